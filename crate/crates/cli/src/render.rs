//! SVG drawings of instances, solutions and the location grid.
//!
//! Element kinds are kept distinct so drawings can be inspected by tag:
//! tours are the only `<path>` elements, grid circles the only `<circle>`
//! elements, rays are `<line>`, points `<rect>` and the depot a `<polygon>`.
//! Rings are shaded with wide-stroked `<ellipse>` bands, marked rings grey.

use std::fmt::Write as _;

use ktc_core::discretization::LocationGrid;
use ktc_core::rings::{RingLayout, RingPartition};
use ktc_core::{Instance, Point, Solution};

const SIZE: f64 = 800.0;
const MARGIN: f64 = 24.0;
/// Rays are labelled only up to this many.
const MAX_LABELLED_RAYS: usize = 64;

/// Grid data to draw under the instance.
pub struct GridOverlay<'a> {
    pub grid: &'a LocationGrid,
    pub layout: Option<&'a RingLayout>,
    pub partition: Option<&'a RingPartition>,
}

struct Frame {
    origin: Point,
    scale: f64,
}

impl Frame {
    fn map(&self, p: Point) -> (f64, f64) {
        (
            SIZE / 2.0 + (p.x - self.origin.x) * self.scale,
            SIZE / 2.0 - (p.y - self.origin.y) * self.scale,
        )
    }
}

fn tour_colour(i: usize) -> String {
    format!("hsl({:.1},65%,42%)", (i as f64 * 137.508) % 360.0)
}

pub fn render_svg(
    instance: &Instance,
    solution: Option<&Solution>,
    overlay: Option<&GridOverlay<'_>>,
) -> String {
    let origin = instance.origin();
    let mut extent = instance.max_radius();
    if let Some(o) = overlay {
        extent = extent.max(o.grid.outer_radius());
    }
    if !(extent > 0.0) {
        extent = 1.0;
    }
    let frame = Frame {
        origin,
        scale: (SIZE / 2.0 - MARGIN) / extent,
    };

    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{SIZE}" height="{SIZE}" viewBox="0 0 {SIZE} {SIZE}">"#
    );
    let (cx, cy) = frame.map(origin);

    if let Some(o) = overlay {
        draw_grid(&mut out, &frame, (cx, cy), o);
    }

    if let Some(sol) = solution {
        let _ = writeln!(out, r#"<g fill="none" stroke-width="1.5">"#);
        for (i, tour) in sol.tours.iter().enumerate() {
            let mut d = format!("M{cx:.3},{cy:.3}");
            for &p in tour.points() {
                let (x, y) = frame.map(instance.point(p));
                let _ = write!(d, " L{x:.3},{y:.3}");
            }
            d.push_str(" Z");
            let _ = writeln!(out, r#"<path d="{d}" stroke="{}"/>"#, tour_colour(i));
        }
        let _ = writeln!(out, "</g>");
    }

    let _ = writeln!(out, r##"<g fill="#111">"##);
    for &p in instance.points() {
        let (x, y) = frame.map(p);
        let _ = writeln!(
            out,
            r#"<rect x="{:.3}" y="{:.3}" width="4" height="4"/>"#,
            x - 2.0,
            y - 2.0
        );
    }
    let _ = writeln!(out, "</g>");
    let _ = writeln!(
        out,
        r##"<polygon points="{:.3},{:.3} {:.3},{:.3} {:.3},{:.3} {:.3},{:.3}" fill="#d22" stroke="#000"/>"##,
        cx,
        cy - 7.0,
        cx + 7.0,
        cy,
        cx,
        cy + 7.0,
        cx - 7.0,
        cy
    );
    out.push_str("</svg>\n");
    out
}

fn draw_grid(out: &mut String, frame: &Frame, (cx, cy): (f64, f64), o: &GridOverlay<'_>) {
    let g = o.grid;
    let px = |r: f64| r * frame.scale;

    if let Some(layout) = o.layout {
        let _ = writeln!(out, r#"<g fill="none">"#);
        for ring in 0..layout.ring_count {
            let circles = layout.circles_of_ring(ring);
            let inner = g.radius(circles.start);
            let outer = g.radius((circles.end).min(g.circle_count - 1));
            let marked = o.partition.is_some_and(|p| p.is_marked(ring));
            let colour = if marked {
                "#9a9a9a"
            } else if ring % 2 == 0 {
                "#eef2fb"
            } else {
                "#f8f4ea"
            };
            let _ = writeln!(
                out,
                r#"<ellipse cx="{cx:.3}" cy="{cy:.3}" rx="{r:.3}" ry="{r:.3}" stroke="{colour}" stroke-width="{w:.3}" opacity="0.7"/>"#,
                r = px((inner + outer) / 2.0),
                w = px(outer - inner).max(0.5),
            );
        }
        let _ = writeln!(out, "</g>");
    }

    let _ = writeln!(out, r##"<g fill="none" stroke="#8aa" stroke-width="0.5">"##);
    for &r in g.radii() {
        let _ = writeln!(out, r#"<circle cx="{cx:.3}" cy="{cy:.3}" r="{:.3}"/>"#, px(r));
    }
    for ray in 0..g.ray_count {
        let a = g.ray_angle(ray);
        let (x1, y1) = (cx + px(g.inner_radius) * a.cos(), cy - px(g.inner_radius) * a.sin());
        let (x2, y2) = (cx + px(g.outer_radius()) * a.cos(), cy - px(g.outer_radius()) * a.sin());
        let _ = writeln!(out, r#"<line x1="{x1:.3}" y1="{y1:.3}" x2="{x2:.3}" y2="{y2:.3}"/>"#);
    }
    let _ = writeln!(out, "</g>");

    if g.ray_count <= MAX_LABELLED_RAYS {
        let _ = writeln!(out, r##"<g font-size="9" fill="#566" text-anchor="middle">"##);
        let r = px(g.outer_radius()) + 10.0;
        for ray in 0..g.ray_count {
            let a = g.ray_angle(ray);
            let _ = writeln!(
                out,
                r#"<text x="{:.3}" y="{:.3}">{ray}</text>"#,
                cx + r * a.cos(),
                cy - r * a.sin() + 3.0
            );
        }
        let _ = writeln!(out, "</g>");
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use ktc_core::discretization::build_grid;

    fn count(svg: &str, tag: &str) -> usize {
        svg.matches(&format!("<{tag} ")).count()
    }

    #[test]
    fn empty_instance_draws_only_the_depot() {
        let i = Instance::at_origin(vec![], 2).unwrap();
        let svg = render_svg(&i, None, None);
        assert_eq!(count(&svg, "polygon"), 1);
        assert_eq!(count(&svg, "rect"), 0);
        assert_eq!(count(&svg, "path"), 0);
    }

    #[test]
    fn grid_counts() {
        let i = Instance::at_origin(vec![Point::new(10.0, 0.0)], 3).unwrap();
        let g = build_grid(10.0, 100, 3, 0.5).unwrap();
        let o = GridOverlay {
            grid: &g,
            layout: None,
            partition: None,
        };
        let svg = render_svg(&i, None, Some(&o));
        assert_eq!(count(&svg, "circle"), 36);
        assert_eq!(count(&svg, "line"), 38);
        assert_eq!(count(&svg, "text"), 38);
    }
}
