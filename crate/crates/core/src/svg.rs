//! Minimal standalone SVG emitters. CSV files are the canonical output;
//! these are for a quick look.

use std::fmt::Write;

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 400.0;
const MARGIN: f64 = 56.0;

fn header(out: &mut String, title: &str) {
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(out, r#"<text x="{}" y="20" text-anchor="middle">{}</text>"#, WIDTH / 2.0, escape(title));
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn axes(out: &mut String, x_label: &str, y_label: &str, x_range: (f64, f64), y_range: (f64, f64)) {
    let (x0, y0, x1, y1) = (MARGIN, HEIGHT - MARGIN, WIDTH - MARGIN, MARGIN);
    let _ = writeln!(out, r#"<path d="M{x0} {y1} L{x0} {y0} L{x1} {y0}" stroke="black" fill="none"/>"#);
    let _ = writeln!(out, r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#, WIDTH / 2.0, HEIGHT - 16.0, escape(x_label));
    let _ = writeln!(
        out,
        r#"<text x="16" y="{}" text-anchor="middle" transform="rotate(-90 16 {})">{}</text>"#,
        HEIGHT / 2.0,
        HEIGHT / 2.0,
        escape(y_label)
    );
    let _ = writeln!(out, r#"<text x="{x0}" y="{}" text-anchor="middle">{:.3}</text>"#, y0 + 16.0, x_range.0);
    let _ = writeln!(out, r#"<text x="{x1}" y="{}" text-anchor="middle">{:.3}</text>"#, y0 + 16.0, x_range.1);
    let _ = writeln!(out, r#"<text x="{}" y="{y0}" text-anchor="end">{:.3}</text>"#, x0 - 4.0, y_range.0);
    let _ = writeln!(out, r#"<text x="{}" y="{}" text-anchor="end">{:.3}</text>"#, x0 - 4.0, y1 + 4.0, y_range.1);
}

fn range(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = values
        .filter(|v| v.is_finite())
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(v), b.max(v)));
    if !lo.is_finite() {
        (0.0, 1.0)
    } else if hi > lo {
        (lo, hi)
    } else {
        (lo - 0.5, lo + 0.5)
    }
}

/// Polyline plot of `(x, y)` points; non-finite points are skipped.
pub fn line_plot(title: &str, x_label: &str, y_label: &str, points: &[(f64, f64)]) -> String {
    let mut out = String::new();
    header(&mut out, title);
    let xr = range(points.iter().map(|p| p.0));
    let yr = range(points.iter().map(|p| p.1));
    axes(&mut out, x_label, y_label, xr, yr);
    let sx = |x: f64| MARGIN + (x - xr.0) / (xr.1 - xr.0) * (WIDTH - 2.0 * MARGIN);
    let sy = |y: f64| HEIGHT - MARGIN - (y - yr.0) / (yr.1 - yr.0) * (HEIGHT - 2.0 * MARGIN);
    let mut path = String::new();
    for &(x, y) in points.iter().filter(|p| p.0.is_finite() && p.1.is_finite()) {
        let _ = write!(path, "{}{:.2} {:.2} ", if path.is_empty() { "M" } else { "L" }, sx(x), sy(y));
    }
    let _ = writeln!(out, r#"<path d="{}" stroke="steelblue" stroke-width="1.5" fill="none"/>"#, path.trim_end());
    out.push_str("</svg>\n");
    out
}

/// Heatmap of categorical cells; `cells[j][i]` is the category index at
/// `(xs[i], ys[j])`, coloured from `palette` and explained by `legend`.
pub fn heatmap(
    title: &str,
    x_label: &str,
    y_label: &str,
    xs: &[f64],
    ys: &[f64],
    cells: &[Vec<usize>],
    legend: &[(&str, &str)],
) -> String {
    let mut out = String::new();
    header(&mut out, title);
    let xr = range(xs.iter().copied());
    let yr = range(ys.iter().copied());
    axes(&mut out, x_label, y_label, xr, yr);
    let w = (WIDTH - 2.0 * MARGIN) / xs.len().max(1) as f64;
    let h = (HEIGHT - 2.0 * MARGIN) / ys.len().max(1) as f64;
    for (j, row) in cells.iter().enumerate() {
        for (i, &c) in row.iter().enumerate() {
            let colour = legend.get(c).map_or("gray", |l| l.1);
            let _ = writeln!(
                out,
                r#"<rect x="{:.2}" y="{:.2}" width="{:.2}" height="{:.2}" fill="{colour}" stroke="white"/>"#,
                MARGIN + i as f64 * w,
                HEIGHT - MARGIN - (j + 1) as f64 * h,
                w,
                h
            );
        }
    }
    for (k, (name, colour)) in legend.iter().enumerate() {
        let y = MARGIN + 16.0 * k as f64;
        let _ = writeln!(out, r#"<rect x="{}" y="{}" width="10" height="10" fill="{colour}"/>"#, WIDTH - MARGIN + 6.0, y);
        let _ = writeln!(out, r#"<text x="{}" y="{}" font-size="9">{}</text>"#, WIDTH - MARGIN + 18.0, y + 9.0, escape(name));
    }
    out.push_str("</svg>\n");
    out
}
