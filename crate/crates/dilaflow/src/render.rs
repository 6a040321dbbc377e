//! Deterministic SVG rendering of polygon nets with overlays.
//!
//! The net draws every chart polygon in place with pairing labels on glued
//! edges; traces render as per-polygon polylines coloured by the accumulated
//! dilation ratio, geodesics and saddle connections as highlighted chains,
//! and sweep reports as a classification strip under the net.

use dilaflow_core::cylinder::{extend_to_cylinder, ExtendConfig};
use dilaflow_core::geodesics::closed_geodesics_in_direction;
use dilaflow_core::geom::{DirectionAngle, PlanarPoint};
use dilaflow_core::saddle::SaddleConnection;
use dilaflow_core::surface::Surface;
use dilaflow_core::trace::{trace, TraceConfig};
use std::fmt::Write as _;

use crate::report::{TraceHeader, TraceLine};

pub struct RenderSpec<'a> {
    pub surface: &'a Surface,
    pub traces: Vec<(TraceHeader, Vec<TraceLine>)>,
    pub geodesic_direction: Option<f64>,
    /// Shade the maximal cylinders through the geodesics of this direction
    /// by drawing sampled members of each family.
    pub cylinder_direction: Option<f64>,
    pub connection: Option<SaddleConnection>,
    pub sweep: Option<crate::report::SweepJson>,
    /// Pixels per chart unit.
    pub scale: f64,
}

impl<'a> RenderSpec<'a> {
    pub fn new(surface: &'a Surface) -> Self {
        RenderSpec {
            surface,
            traces: Vec::new(),
            geodesic_direction: None,
            cylinder_direction: None,
            connection: None,
            sweep: None,
            scale: 160.0,
        }
    }
}

fn fmt(x: f64) -> String {
    format!("{x:.6}")
}

struct Canvas {
    body: String,
    min: (f64, f64),
    max: (f64, f64),
    scale: f64,
}

impl Canvas {
    fn new(surface: &Surface, scale: f64) -> Self {
        let mut min = (f64::MAX, f64::MAX);
        let mut max = (f64::MIN, f64::MIN);
        for p in &surface.polygons {
            for v in &p.vertices {
                min.0 = min.0.min(v.x);
                min.1 = min.1.min(v.y);
                max.0 = max.0.max(v.x);
                max.1 = max.1.max(v.y);
            }
        }
        Canvas { body: String::new(), min, max, scale }
    }

    fn margin(&self) -> f64 {
        0.08 * ((self.max.0 - self.min.0).max(self.max.1 - self.min.1)).max(1e-9)
    }

    /// Chart point to pixel coordinates (y flipped).
    fn px(&self, p: &PlanarPoint) -> (f64, f64) {
        let m = self.margin();
        (
            (p.x - self.min.0 + m) * self.scale,
            (self.max.1 - p.y + m) * self.scale,
        )
    }

    fn width(&self) -> f64 {
        (self.max.0 - self.min.0 + 2.0 * self.margin()) * self.scale
    }

    fn height(&self) -> f64 {
        (self.max.1 - self.min.1 + 2.0 * self.margin()) * self.scale
    }

    fn polyline(&mut self, pts: &[(f64, f64)], stroke: &str, width: f64, opacity: f64) {
        let coords: Vec<String> =
            pts.iter().map(|(x, y)| format!("{},{}", fmt(*x), fmt(*y))).collect();
        let _ = writeln!(
            self.body,
            "<polyline points=\"{}\" fill=\"none\" stroke=\"{}\" stroke-width=\"{}\" stroke-opacity=\"{}\"/>",
            coords.join(" "),
            stroke,
            fmt(width),
            fmt(opacity)
        );
    }

    fn polygon(&mut self, pts: &[(f64, f64)], fill: &str, stroke: &str) {
        let coords: Vec<String> =
            pts.iter().map(|(x, y)| format!("{},{}", fmt(*x), fmt(*y))).collect();
        let _ = writeln!(
            self.body,
            "<polygon points=\"{}\" fill=\"{}\" fill-opacity=\"0.35\" stroke=\"{}\" stroke-width=\"1.2\"/>",
            coords.join(" "),
            fill,
            stroke
        );
    }

    fn circle(&mut self, c: (f64, f64), r: f64, fill: &str) {
        let _ = writeln!(
            self.body,
            "<circle cx=\"{}\" cy=\"{}\" r=\"{}\" fill=\"{}\"/>",
            fmt(c.0),
            fmt(c.1),
            fmt(r),
            fill
        );
    }

    fn text(&mut self, at: (f64, f64), size: f64, content: &str) {
        let _ = writeln!(
            self.body,
            "<text x=\"{}\" y=\"{}\" font-size=\"{}\" font-family=\"monospace\" fill=\"#333333\">{}</text>",
            fmt(at.0),
            fmt(at.1),
            fmt(size),
            content
        );
    }

    fn rect(&mut self, x: f64, y: f64, w: f64, h: f64, fill: &str) {
        let _ = writeln!(
            self.body,
            "<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"{}\"/>",
            fmt(x),
            fmt(y),
            fmt(w),
            fmt(h),
            fill
        );
    }
}

/// Colour for an accumulated dilation ratio on a log ramp.
fn ratio_color(ratio: f64) -> String {
    let t = (ratio.max(1e-12).ln() / 8.0).clamp(-1.0, 1.0);
    let (r, g, b) = if t < 0.0 {
        let u = -t;
        ((40.0 + 30.0 * u) as u8, (90.0 - 50.0 * u) as u8, (200.0 + 55.0 * u) as u8)
    } else {
        ((200.0 + 55.0 * t) as u8, (90.0 - 50.0 * t) as u8, (40.0 + 30.0 * t) as u8)
    };
    format!("#{r:02x}{g:02x}{b:02x}")
}

fn class_color(class: &str) -> &'static str {
    match class {
        "morse_smale" => "#2a9d3f",
        "saddle_connection" => "#e0a800",
        "boundary" => "#4477cc",
        _ => "#bbbbbb",
    }
}

pub fn render(spec: &RenderSpec) -> String {
    let surface = spec.surface;
    let mut canvas = Canvas::new(surface, spec.scale);

    // Polygon net.
    let palette = ["#cdddf2", "#f2e3cd", "#d6f2cd", "#f2cde0", "#cdf2ee", "#e8cdf2"];
    for (i, poly) in surface.polygons.iter().enumerate() {
        let pts: Vec<(f64, f64)> = poly.vertices.iter().map(|v| canvas.px(v)).collect();
        canvas.polygon(&pts, palette[i % palette.len()], "#555555");
    }
    // Pairing labels at edge midpoints.
    for (k, pairing) in surface.pairings.iter().enumerate() {
        for e in [pairing.e, pairing.f] {
            let poly = &surface.polygons[e.polygon];
            let mid = poly.edge_point(e.edge_index, 0.5);
            let at = canvas.px(&mid);
            canvas.text((at.0 + 3.0, at.1 - 3.0), 11.0, &format!("e{k}"));
        }
    }
    // Vertices: singular classes darker, marked points hollow-ish.
    for sing in &surface.singularities {
        for &(p, v) in &sing.corners {
            let at = canvas.px(&surface.polygons[p].vertices[v]);
            let color = if sing.is_flat { "#888888" } else { "#c0392b" };
            canvas.circle(at, if sing.is_flat { 2.5 } else { 3.5 }, color);
        }
    }

    // Trace overlays.
    for (header, lines) in &spec.traces {
        let mut pos = PlanarPoint::new(header.start[0], header.start[1]);
        let mut poly = header.polygon;
        for line in lines {
            let edge = dilaflow_core::surface::EdgeRef::new(line.edge[0], line.edge[1]);
            if edge.polygon >= surface.polygons.len() {
                break;
            }
            let hit = surface.polygons[edge.polygon].edge_point(edge.edge_index, line.coord);
            if poly == edge.polygon {
                let a = canvas.px(&pos);
                let b = canvas.px(&hit);
                canvas.polyline(&[a, b], &ratio_color(line.ratio), 1.4, 0.85);
            }
            match surface.crossing_side(edge) {
                Some(side) => {
                    pos = surface.polygons[side.other.polygon]
                        .edge_point(side.other.edge_index, 1.0 - line.coord);
                    poly = side.other.polygon;
                }
                None => break,
            }
        }
    }

    // Cylinder shading: sampled members of each maximal family.
    if let Some(dir) = spec.cylinder_direction {
        let scan =
            closed_geodesics_in_direction(surface, DirectionAngle::new(dir), &Default::default());
        for geo in &scan.hyperbolic {
            let Ok(cyl) = extend_to_cylinder(surface, geo, &ExtendConfig::default()) else {
                continue;
            };
            let (lo, hi) = cyl.direction_interval;
            let n = 12;
            for k in 1..n {
                let d = lo + (hi - lo) * k as f64 / n as f64;
                let probe = closed_geodesics_in_direction(
                    surface,
                    DirectionAngle::new(d),
                    &Default::default(),
                );
                for member in &probe.hyperbolic {
                    let start = member.base_point(surface);
                    if let Ok(run) = trace(
                        surface,
                        start,
                        member.direction,
                        &TraceConfig::with_max_crossings(member.signature.len() + 1),
                    ) {
                        for (_p, a, b) in run.segments(surface) {
                            canvas.polyline(&[canvas.px(&a), canvas.px(&b)], "#e67e22", 1.6, 0.35);
                        }
                    }
                }
            }
        }
    }

    // Closed geodesics parallel to a direction.
    if let Some(dir) = spec.geodesic_direction {
        let scan =
            closed_geodesics_in_direction(surface, DirectionAngle::new(dir), &Default::default());
        for geo in &scan.hyperbolic {
            let start = geo.base_point(surface);
            if let Ok(run) = trace(
                surface,
                start,
                geo.direction,
                &TraceConfig::with_max_crossings(geo.signature.len() + 1),
            ) {
                for (p, a, b) in run.segments(surface) {
                    let _ = p;
                    canvas.polyline(&[canvas.px(&a), canvas.px(&b)], "#c0392b", 2.6, 0.95);
                }
            }
        }
    }

    // A saddle connection chain.
    if let Some(sc) = &spec.connection {
        if let Some(chain) = sc.chain(surface) {
            for (_p, a, b) in chain {
                canvas.polyline(&[canvas.px(&a), canvas.px(&b)], "#7d3c98", 2.6, 0.95);
            }
        }
    }

    // Sweep strip under the net.
    let mut strip_height = 0.0;
    if let Some(sweep) = &spec.sweep {
        strip_height = 46.0;
        let y0 = canvas.height() + 8.0;
        let w = canvas.width();
        for e in &sweep.entries {
            let x = e.direction / std::f64::consts::TAU * w;
            let next = 1.2 * w / sweep.entries.len().max(1) as f64;
            canvas.rect(x, y0, next, 20.0, class_color(&e.class));
            if e.has_hyperbolic {
                canvas.rect(x, y0 + 22.0, next, 8.0, "#c0392b");
            }
        }
        canvas.text((4.0, y0 + 42.0), 11.0, "strip: class per direction; red ticks: hyperbolic witnesses");
    }

    let width = canvas.width();
    let height = canvas.height() + strip_height + 10.0;
    let mut out = String::new();
    let _ = writeln!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{}\" height=\"{}\" viewBox=\"0 0 {} {}\">",
        fmt(width),
        fmt(height),
        fmt(width),
        fmt(height)
    );
    let _ = writeln!(out, "<rect width=\"100%\" height=\"100%\" fill=\"#fcfcfa\"/>");
    out.push_str(&canvas.body);
    out.push_str("</svg>\n");
    out
}
