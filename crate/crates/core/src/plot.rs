//! Static ternary plots of three-state regions as SVG.
//!
//! Barycentric layout: `s1` at the bottom left, `s2` at the bottom right and
//! `s3` at the top. Output depends only on the input, so repeated runs give
//! identical files.

use std::fmt::Write;

use crate::error::{Error, Result};

pub const WIDTH: f64 = 800.0;
pub const HEIGHT: f64 = 700.0;
/// Fill colours in layer order.
pub const PALETTE: [&str; 6] = ["#d62728", "#1f77b4", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b"];

const LEFT: (f64, f64) = (100.0, 620.0);
const RIGHT: (f64, f64) = (700.0, 620.0);
// equilateral: height = 600 * sqrt(3) / 2
const TOP: (f64, f64) = (400.0, 620.0 - 519.615_242_270_663_2);

/// One region to draw.
#[derive(Debug, Clone, PartialEq)]
pub struct PlotLayer {
    pub label: String,
    pub vertices: Vec<Vec<f64>>,
}

fn to_xy(s: &[f64]) -> (f64, f64) {
    (s[0] * LEFT.0 + s[1] * RIGHT.0 + s[2] * TOP.0, s[0] * LEFT.1 + s[1] * RIGHT.1 + s[2] * TOP.1)
}

/// Points in counter-clockwise screen order around their centroid.
fn hull_order(points: &[(f64, f64)]) -> Vec<(f64, f64)> {
    let n = points.len() as f64;
    let cx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let cy = points.iter().map(|p| p.1).sum::<f64>() / n;
    let mut sorted = points.to_vec();
    sorted.sort_by(|a, b| (a.1 - cy).atan2(a.0 - cx).total_cmp(&(b.1 - cy).atan2(b.0 - cx)));
    sorted
}

fn coords(v: &[f64]) -> String {
    let parts: Vec<String> = v.iter().map(|x| format!("{x:.4}")).collect();
    format!("({})", parts.join(", "))
}

/// Render the layers over the simplex with corner names `corners`.
pub fn ternary_svg(layers: &[PlotLayer], corners: [&str; 3]) -> Result<String> {
    for layer in layers {
        if let Some(v) = layer.vertices.iter().find(|v| v.len() != 3) {
            return Err(Error::DimensionMismatch { expected: 3, found: v.len() });
        }
    }
    let mut svg = String::new();
    let w = &mut svg;
    // fmt::Write on String cannot fail
    let _ = writeln!(
        w,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"#
    );
    let _ = writeln!(w, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        w,
        r#"<polygon points="{:.2},{:.2} {:.2},{:.2} {:.2},{:.2}" fill="none" stroke="black" stroke-width="1.5"/>"#,
        LEFT.0, LEFT.1, RIGHT.0, RIGHT.1, TOP.0, TOP.1
    );
    let _ = writeln!(
        w,
        r#"<text x="{:.2}" y="{:.2}" font-family="sans-serif" font-size="16" text-anchor="end">{}</text>"#,
        LEFT.0 - 8.0,
        LEFT.1 + 20.0,
        corners[0]
    );
    let _ = writeln!(
        w,
        r#"<text x="{:.2}" y="{:.2}" font-family="sans-serif" font-size="16">{}</text>"#,
        RIGHT.0 + 8.0,
        RIGHT.1 + 20.0,
        corners[1]
    );
    let _ = writeln!(
        w,
        r#"<text x="{:.2}" y="{:.2}" font-family="sans-serif" font-size="16" text-anchor="middle">{}</text>"#,
        TOP.0,
        TOP.1 - 12.0,
        corners[2]
    );

    for (idx, layer) in layers.iter().enumerate() {
        let colour = PALETTE[idx % PALETTE.len()];
        let points: Vec<(f64, f64)> = layer.vertices.iter().map(|v| to_xy(v)).collect();
        if !points.is_empty() {
            let ordered = hull_order(&points);
            let list: Vec<String> = ordered.iter().map(|(x, y)| format!("{x:.2},{y:.2}")).collect();
            let _ = writeln!(
                w,
                r#"<polygon points="{}" fill="{colour}" fill-opacity="0.35" stroke="{colour}" stroke-width="2"/>"#,
                list.join(" ")
            );
        }
        for (v, (x, y)) in layer.vertices.iter().zip(&points) {
            let _ = writeln!(w, r#"<circle cx="{x:.2}" cy="{y:.2}" r="3.5" fill="{colour}"/>"#);
            let _ = writeln!(
                w,
                r#"<text x="{:.2}" y="{:.2}" font-family="sans-serif" font-size="11" fill="{colour}">{}</text>"#,
                x + 6.0,
                y - 6.0 - 13.0 * idx as f64,
                coords(v)
            );
        }
        let ly = 30.0 + 22.0 * idx as f64;
        let _ = writeln!(
            w,
            r#"<rect x="20" y="{:.2}" width="14" height="14" fill="{colour}" fill-opacity="0.6"/>"#,
            ly - 11.0
        );
        let _ = writeln!(
            w,
            r#"<text x="40" y="{ly:.2}" font-family="sans-serif" font-size="14">{}</text>"#,
            escape(&layer.label)
        );
    }
    let _ = writeln!(w, "</svg>");
    Ok(svg)
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sr_layer() -> PlotLayer {
        PlotLayer {
            label: "SR".into(),
            vertices: vec![vec![0.0, 0.0, 1.0], vec![0.0, 0.594953, 0.405047], vec![0.406208, 0.353278, 0.240513]],
        }
    }

    #[test]
    fn corners_map_to_triangle() {
        assert_eq!(to_xy(&[1.0, 0.0, 0.0]), LEFT);
        assert_eq!(to_xy(&[0.0, 1.0, 0.0]), RIGHT);
        assert_eq!(to_xy(&[0.0, 0.0, 1.0]), TOP);
    }

    #[test]
    fn single_region_is_red_and_labelled() {
        let svg = ternary_svg(&[sr_layer()], ["s1", "s2", "s3"]).unwrap();
        assert_eq!(svg.matches("<polygon").count(), 2);
        assert!(svg.contains(r##"fill="#d62728" fill-opacity="0.35""##));
        assert!(svg.contains("(0.4062, 0.3533, 0.2405)"));
        assert!(svg.contains(r#"width="800" height="700""#));
    }

    #[test]
    fn overlays_use_distinct_colours_and_are_deterministic() {
        let mut m1 = sr_layer();
        m1.label = "M1".into();
        let layers = [sr_layer(), m1.clone(), m1];
        let a = ternary_svg(&layers, ["1", "2", "3"]).unwrap();
        assert_eq!(a, ternary_svg(&layers, ["1", "2", "3"]).unwrap());
        for c in &PALETTE[..3] {
            assert!(a.contains(c));
        }
    }

    #[test]
    fn wrong_dimension_is_rejected() {
        let layer = PlotLayer { label: "x".into(), vertices: vec![vec![0.25; 4]] };
        assert!(ternary_svg(&[layer], ["a", "b", "c"]).is_err());
    }
}
