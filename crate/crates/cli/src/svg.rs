use std::fmt::Write as _;

use meshtopo_core::topology::Topology;
use meshtopo_core::voronoi::VoronoiDiagram;

/// Deterministic SVG of a topology with optional Voronoi cell outlines.
///
/// The viewBox is the deployment area in metres plus a 2% margin, with y
/// pointing up.
pub fn render_svg(topo: &Topology, voronoi: Option<&VoronoiDiagram>) -> String {
    let area = topo.area();
    let span = area.w.max(area.h);
    let m = 0.02 * span;
    let r = 0.004 * span;
    let stroke = 0.0015 * span;
    let fy = |y: f64| area.h - y;
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" viewBox="{:.3} {:.3} {:.3} {:.3}">"#,
        -m,
        -m,
        area.w + 2.0 * m,
        area.h + 2.0 * m
    );
    let _ = writeln!(
        s,
        r#"<rect x="0" y="0" width="{:.3}" height="{:.3}" fill="white" stroke="black" stroke-width="{stroke:.3}"/>"#,
        area.w, area.h
    );
    if let Some(v) = voronoi {
        let _ = writeln!(s, r#"<g fill="none" stroke="steelblue" stroke-width="{stroke:.3}">"#);
        for cell in &v.cells {
            let pts: Vec<String> = cell.iter().map(|c| format!("{:.3},{:.3}", c.x, fy(c.y))).collect();
            let _ = writeln!(s, r#"<polygon points="{}"/>"#, pts.join(" "));
        }
        s.push_str("</g>\n");
    }
    let _ = writeln!(s, r#"<g stroke="dimgray" stroke-width="{stroke:.3}">"#);
    for e in topo.links() {
        let a = topo.point(e.lo()).expect("link endpoints exist");
        let b = topo.point(e.hi()).expect("link endpoints exist");
        let _ = writeln!(
            s,
            r#"<line x1="{:.3}" y1="{:.3}" x2="{:.3}" y2="{:.3}"/>"#,
            a.x_m(),
            fy(a.y_m()),
            b.x_m(),
            fy(b.y_m())
        );
    }
    s.push_str("</g>\n");
    let _ = writeln!(s, r#"<g fill="crimson">"#);
    for n in topo.nodes().iter() {
        let _ = writeln!(
            s,
            r#"<circle cx="{:.3}" cy="{:.3}" r="{r:.3}"><title>{}</title></circle>"#,
            n.point.x_m(),
            fy(n.point.y_m()),
            n.id.0
        );
    }
    s.push_str("</g>\n</svg>\n");
    s
}
