//! Minimal SVG emission for curves, polygons and point sets.

use std::fmt::Write;

use crate::constructions::{PiecewiseCircularCurve, PolyLine};
use crate::geom::{Circle, Point2};

enum Item {
    Path { points: Vec<Point2>, closed: bool, stroke: &'static str },
    Circle { circle: Circle, stroke: &'static str },
    Dots { points: Vec<Point2>, fill: &'static str },
}

/// Collects shapes in model coordinates and renders them with the y axis
/// pointing up.
#[derive(Default)]
pub struct Svg {
    items: Vec<Item>,
}

impl Svg {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn polyline(&mut self, points: Vec<Point2>, closed: bool, stroke: &'static str) -> &mut Self {
        self.items.push(Item::Path { points, closed, stroke });
        self
    }

    pub fn circle(&mut self, circle: Circle, stroke: &'static str) -> &mut Self {
        self.items.push(Item::Circle { circle, stroke });
        self
    }

    pub fn dots(&mut self, points: Vec<Point2>, fill: &'static str) -> &mut Self {
        self.items.push(Item::Dots { points, fill });
        self
    }

    fn bounds(&self) -> (f64, f64, f64, f64) {
        let mut b = (f64::INFINITY, f64::INFINITY, f64::NEG_INFINITY, f64::NEG_INFINITY);
        let mut add = |p: Point2, pad: f64| {
            b.0 = b.0.min(p.x - pad);
            b.1 = b.1.min(p.y - pad);
            b.2 = b.2.max(p.x + pad);
            b.3 = b.3.max(p.y + pad);
        };
        for item in &self.items {
            match item {
                Item::Path { points, .. } | Item::Dots { points, .. } => points.iter().for_each(|&p| add(p, 0.0)),
                Item::Circle { circle, .. } => add(circle.center, circle.radius),
            }
        }
        if !b.0.is_finite() {
            return (-1.0, -1.0, 1.0, 1.0);
        }
        b
    }

    pub fn render(&self) -> String {
        let (x0, y0, x1, y1) = self.bounds();
        let pad = 0.05 * (x1 - x0).max(y1 - y0).max(1e-9);
        let (w, h) = (x1 - x0 + 2.0 * pad, y1 - y0 + 2.0 * pad);
        let stroke = 0.003 * w.max(h);
        let mut s = String::new();
        let _ = writeln!(
            s,
            r#"<svg xmlns="http://www.w3.org/2000/svg" viewBox="{} {} {} {}" width="600" height="{:.0}">"#,
            x0 - pad,
            -(y1 + pad),
            w,
            h,
            600.0 * h / w
        );
        let _ = writeln!(s, r#"<g transform="scale(1,-1)" fill="none" stroke-width="{stroke}">"#);
        for item in &self.items {
            match item {
                Item::Path { points, closed, stroke } => {
                    let pts: Vec<String> = points.iter().map(|p| format!("{:.6},{:.6}", p.x, p.y)).collect();
                    let tag = if *closed { "polygon" } else { "polyline" };
                    let _ = writeln!(s, r#"<{tag} points="{}" stroke="{stroke}"/>"#, pts.join(" "));
                }
                Item::Circle { circle, stroke } => {
                    let _ = writeln!(
                        s,
                        r#"<circle cx="{:.6}" cy="{:.6}" r="{:.6}" stroke="{stroke}"/>"#,
                        circle.center.x, circle.center.y, circle.radius
                    );
                }
                Item::Dots { points, fill } => {
                    for p in points {
                        let _ = writeln!(
                            s,
                            r#"<circle cx="{:.6}" cy="{:.6}" r="{:.6}" fill="{fill}" stroke="none"/>"#,
                            p.x,
                            p.y,
                            1.5 * stroke
                        );
                    }
                }
            }
        }
        s.push_str("</g>\n</svg>\n");
        s
    }
}

/// The curve γ in black and its equitangent locus Γ in red.
pub fn construction_svg(curve: &PiecewiseCircularCurve, locus: Option<&PolyLine>) -> String {
    let mut svg = Svg::new();
    svg.polyline(curve.sample(48), true, "black");
    if let Some(l) = locus {
        svg.polyline(l.vertices(), true, "red");
    }
    svg.render()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::{equitangent_locus, smooth_regular_ngon, EquitangentLocus};

    #[test]
    fn octagon_svg_has_both_curves() {
        let c = smooth_regular_ngon(8, 0.02, 100.0).unwrap();
        let EquitangentLocus::Polyline(l) = equitangent_locus(&c).unwrap() else {
            panic!("expected a polyline");
        };
        let s = construction_svg(&c, Some(&l));
        assert!(s.starts_with("<svg"));
        assert_eq!(s.matches("<polygon").count(), 2);
    }
}
