//! Atomic file output and the SVG overlay plot.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::Path;

use marcwt_core::format::fmt_sig;
use marcwt_core::RateRegion;
use tempfile::NamedTempFile;

use crate::CliError;

/// Writes `contents` to `path` through a temporary file in the same directory
/// and a rename, so readers never observe a partial file.
pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<(), CliError> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = NamedTempFile::new_in(dir).map_err(|e| CliError::io(dir, e))?;
    tmp.write_all(contents).map_err(|e| CliError::io(path, e))?;
    tmp.as_file().sync_all().map_err(|e| CliError::io(path, e))?;
    tmp.persist(path).map_err(|e| CliError::io(path, e.error))?;
    Ok(())
}

pub fn ensure_dir(dir: &Path) -> Result<(), CliError> {
    std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))
}

const SIZE: f64 = 600.0;
const MARGIN: f64 = 70.0;
const COLORS: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#7f7f7f", "#9467bd", "#ff7f0e"];

/// Plots each region's boundary on shared linear axes. The axes span the
/// bounding box of `frame` (usually the outer bound), falling back to the
/// union of all regions when `frame` is degenerate.
pub fn svg_overlay(title: &str, regions: &[(&str, &RateRegion)], frame: &RateRegion) -> String {
    let bbox = |r: &RateRegion| {
        r.vertices()
            .iter()
            .fold((0.0f64, 0.0f64), |(x, y), p| (x.max(p.r1), y.max(p.r2)))
    };
    let (mut xmax, mut ymax) = bbox(frame);
    if xmax <= 0.0 || ymax <= 0.0 {
        for (_, r) in regions {
            let (x, y) = bbox(r);
            xmax = xmax.max(x);
            ymax = ymax.max(y);
        }
    }
    let xmax = if xmax > 0.0 { xmax } else { 1.0 };
    let ymax = if ymax > 0.0 { ymax } else { 1.0 };
    let plot = SIZE - 2.0 * MARGIN;
    let sx = |r1: f64| MARGIN + plot * r1 / xmax;
    let sy = |r2: f64| SIZE - MARGIN - plot * r2 / ymax;

    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="600" height="600" viewBox="0 0 600 600" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(out, r#"<rect width="600" height="600" fill="white"/>"#);
    let _ = writeln!(out, r#"<text x="300" y="30" text-anchor="middle" font-size="15">{title}</text>"#);
    let (x0, y0) = (sx(0.0), sy(0.0));
    let _ = writeln!(
        out,
        r#"<path d="M{:.2} {:.2} H{:.2} M{:.2} {:.2} V{:.2}" stroke="black" fill="none"/>"#,
        x0,
        y0,
        sx(xmax),
        x0,
        y0,
        sy(ymax)
    );
    for k in 0..=4 {
        let t = k as f64 / 4.0;
        let (vx, vy) = (xmax * t, ymax * t);
        let _ = writeln!(
            out,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
            sx(vx),
            y0 + 18.0,
            fmt_sig(round_tick(vx))
        );
        let _ = writeln!(
            out,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{}</text>"#,
            x0 - 6.0,
            sy(vy) + 4.0,
            fmt_sig(round_tick(vy))
        );
    }
    let _ = writeln!(
        out,
        r#"<text x="300" y="{:.2}" text-anchor="middle">R1 (bits/channel use)</text>"#,
        SIZE - 25.0
    );
    let _ = writeln!(
        out,
        r#"<text x="20" y="300" text-anchor="middle" transform="rotate(-90 20 300)">R2 (bits/channel use)</text>"#
    );

    for (i, (name, region)) in regions.iter().enumerate() {
        let color = COLORS[i % COLORS.len()];
        let mut points: Vec<String> = region
            .vertices()
            .iter()
            .map(|p| format!("{:.2},{:.2}", sx(p.r1), sy(p.r2)))
            .collect();
        if let Some(first) = points.first().cloned() {
            points.push(first);
        }
        let _ = writeln!(
            out,
            r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="2"/>"#,
            points.join(" ")
        );
        let ly = MARGIN + 18.0 * i as f64;
        let _ = writeln!(
            out,
            r#"<line x1="{:.2}" y1="{ly:.2}" x2="{:.2}" y2="{ly:.2}" stroke="{color}" stroke-width="2"/>"#,
            SIZE - MARGIN - 110.0,
            SIZE - MARGIN - 85.0
        );
        let _ = writeln!(
            out,
            r#"<text x="{:.2}" y="{:.2}">{name}</text>"#,
            SIZE - MARGIN - 78.0,
            ly + 4.0
        );
    }
    out.push_str("</svg>\n");
    out
}

/// Tick labels with four significant digits.
fn round_tick(x: f64) -> f64 {
    format!("{x:.3e}").parse().unwrap_or(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use marcwt_core::RatePentagon;

    #[test]
    fn overlay_has_one_polyline_per_region() {
        let a = RatePentagon::new(1.0, 1.0, 1.5).vertices();
        let b = RatePentagon::new(0.5, 0.8, 1.0).vertices();
        let svg = svg_overlay("demo", &[("a", &a), ("b", &b)], &a);
        assert_eq!(svg.matches("<polyline").count(), 2);
        assert!(svg.contains(r#"width="600" height="600""#));
        assert!(svg.contains("R1 (bits"));
        // The frame spans [0, 1] on both axes: (1, 0) is the bottom-right
        // corner of the plot and (0, 1) the top-left.
        assert!(svg.contains("530.00,530.00"));
        assert!(svg.contains("70.00,70.00"));
    }

    #[test]
    fn atomic_write_replaces_contents() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("x.txt");
        write_atomic(&path, b"one").unwrap();
        write_atomic(&path, b"two").unwrap();
        assert_eq!(std::fs::read(&path).unwrap(), b"two");
        assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 1);
    }
}
