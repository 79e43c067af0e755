//! Minimal hand-rolled SVG log-log chart of a count sweep: axes, the data
//! points, and the least-squares fit line, with the fitted slope in the
//! caption. No plotting dependency; the output is a small standalone file.

use shatterlab_core::families::least_squares;

const W: f64 = 480.0;
const H: f64 = 360.0;
const PAD: f64 = 48.0;

fn scale(v: f64, lo: f64, hi: f64, out_lo: f64, out_hi: f64) -> f64 {
    if (hi - lo).abs() < 1e-12 {
        return (out_lo + out_hi) / 2.0;
    }
    out_lo + (v - lo) / (hi - lo) * (out_hi - out_lo)
}

/// Render `(t, count)` pairs on log-log axes. Counts of zero are plotted at
/// log 1; the fit uses the same clamping.
pub fn svg_loglog(title: &str, counts: &[(usize, usize)]) -> String {
    let pts: Vec<(f64, f64)> = counts
        .iter()
        .map(|&(t, c)| ((t.max(1) as f64).ln(), (c.max(1) as f64).ln()))
        .collect();
    let (slope, intercept) = if pts.len() >= 2 {
        least_squares(&pts)
    } else {
        (0.0, 0.0)
    };
    let xs: Vec<f64> = pts.iter().map(|p| p.0).collect();
    let ys: Vec<f64> = pts.iter().map(|p| p.1).collect();
    let (x_lo, x_hi) = (
        xs.iter().cloned().fold(f64::INFINITY, f64::min),
        xs.iter().cloned().fold(f64::NEG_INFINITY, f64::max),
    );
    let (y_lo, y_hi) = (
        ys.iter().cloned().fold(f64::INFINITY, f64::min),
        ys.iter().cloned().fold(f64::NEG_INFINITY, f64::max),
    );

    let px = |x: f64| scale(x, x_lo, x_hi, PAD, W - PAD);
    let py = |y: f64| scale(y, y_lo, y_hi, H - PAD, PAD);

    let mut svg = String::new();
    svg.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{W}\" height=\"{H}\" \
         viewBox=\"0 0 {W} {H}\">\n"
    ));
    svg.push_str("<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n");
    // Axes.
    svg.push_str(&format!(
        "<line x1=\"{p}\" y1=\"{b}\" x2=\"{r}\" y2=\"{b}\" stroke=\"black\"/>\n",
        p = PAD,
        b = H - PAD,
        r = W - PAD
    ));
    svg.push_str(&format!(
        "<line x1=\"{p}\" y1=\"{b}\" x2=\"{p}\" y2=\"{t}\" stroke=\"black\"/>\n",
        p = PAD,
        b = H - PAD,
        t = PAD
    ));
    svg.push_str(&format!(
        "<text x=\"{x}\" y=\"{y}\" font-size=\"12\" text-anchor=\"middle\">log t</text>\n",
        x = W / 2.0,
        y = H - 12.0
    ));
    svg.push_str(&format!(
        "<text x=\"14\" y=\"{y}\" font-size=\"12\" text-anchor=\"middle\" \
         transform=\"rotate(-90 14 {y})\">log count</text>\n",
        y = H / 2.0
    ));
    // Tick labels at the data extremes.
    for (t, _) in counts {
        let x = px((*t as f64).ln());
        svg.push_str(&format!(
            "<text x=\"{x:.1}\" y=\"{y}\" font-size=\"10\" text-anchor=\"middle\">{t}</text>\n",
            y = H - PAD + 14.0
        ));
    }
    // Fit line across the data range.
    if pts.len() >= 2 {
        let (fx0, fx1) = (x_lo, x_hi);
        svg.push_str(&format!(
            "<line x1=\"{x0:.1}\" y1=\"{y0:.1}\" x2=\"{x1:.1}\" y2=\"{y1:.1}\" \
             stroke=\"steelblue\" stroke-dasharray=\"4 3\"/>\n",
            x0 = px(fx0),
            y0 = py(slope * fx0 + intercept),
            x1 = px(fx1),
            y1 = py(slope * fx1 + intercept)
        ));
    }
    // Data points.
    for p in &pts {
        svg.push_str(&format!(
            "<circle cx=\"{x:.1}\" cy=\"{y:.1}\" r=\"3\" fill=\"crimson\"/>\n",
            x = px(p.0),
            y = py(p.1)
        ));
    }
    svg.push_str(&format!(
        "<text x=\"{x}\" y=\"20\" font-size=\"12\" text-anchor=\"middle\">{title} \
         (fit slope {slope:.3})</text>\n",
        x = W / 2.0
    ));
    svg.push_str("</svg>\n");
    svg
}
