//! Minimal self-contained SVG line plots: a shaded band, a handful of
//! curves, and a dashed reference line at g = 1.

const WIDTH: f64 = 800.0;
const HEIGHT: f64 = 500.0;
const MARGIN_L: f64 = 70.0;
const MARGIN_R: f64 = 20.0;
const MARGIN_T: f64 = 30.0;
const MARGIN_B: f64 = 55.0;

pub struct Series<'a> {
    pub y: &'a [f64],
    pub color: &'a str,
    pub label: &'a str,
}

pub struct BandPlot<'a> {
    pub title: &'a str,
    pub x: &'a [f64],
    pub band_lo: &'a [f64],
    pub band_hi: &'a [f64],
    pub band_label: &'a str,
    pub series: Vec<Series<'a>>,
}

fn nice_ticks(lo: f64, hi: f64, target: usize) -> Vec<f64> {
    if hi <= lo {
        return vec![lo];
    }
    let raw = (hi - lo) / target as f64;
    let mag = 10f64.powf(raw.log10().floor());
    let step = [1.0, 2.0, 2.5, 5.0, 10.0]
        .iter()
        .map(|m| m * mag)
        .find(|s| (hi - lo) / s <= target as f64 + 0.5)
        .unwrap_or(mag * 10.0);
    let start = (lo / step).ceil() * step;
    let mut ticks = Vec::new();
    let mut t = start;
    while t <= hi + 1e-9 * step {
        ticks.push(t);
        t += step;
    }
    ticks
}

pub fn render(plot: &BandPlot<'_>) -> String {
    let x_lo = plot.x.first().copied().unwrap_or(0.0);
    let x_hi = plot.x.last().copied().unwrap_or(1.0);
    let mut y_lo = f64::INFINITY;
    let mut y_hi = f64::NEG_INFINITY;
    for v in plot
        .band_lo
        .iter()
        .chain(plot.band_hi)
        .chain(plot.series.iter().flat_map(|s| s.y.iter()))
        .chain([1.0].iter())
    {
        if v.is_finite() {
            y_lo = y_lo.min(*v);
            y_hi = y_hi.max(*v);
        }
    }
    if y_lo == y_hi {
        y_lo -= 0.5;
        y_hi += 0.5;
    }
    let pad = 0.05 * (y_hi - y_lo);
    let (y_lo, y_hi) = (y_lo - pad, y_hi + pad);

    let px = |x: f64| MARGIN_L + (x - x_lo) / (x_hi - x_lo) * (WIDTH - MARGIN_L - MARGIN_R);
    let py = |y: f64| HEIGHT - MARGIN_B - (y - y_lo) / (y_hi - y_lo) * (HEIGHT - MARGIN_T - MARGIN_B);

    let mut svg = String::new();
    svg.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\" \
         viewBox=\"0 0 {WIDTH} {HEIGHT}\">\n\
         <rect width=\"{WIDTH}\" height=\"{HEIGHT}\" fill=\"white\"/>\n"
    ));

    // Band polygon.
    if !plot.band_lo.is_empty() {
        let mut d = String::from("M");
        for (i, &x) in plot.x.iter().enumerate() {
            d.push_str(&format!(" {:.2},{:.2}", px(x), py(plot.band_hi[i])));
        }
        for (i, &x) in plot.x.iter().enumerate().rev() {
            d.push_str(&format!(" {:.2},{:.2}", px(x), py(plot.band_lo[i])));
        }
        d.push_str(" Z");
        svg.push_str(&format!(
            "<path d=\"{d}\" fill=\"#4a90d9\" fill-opacity=\"0.25\" stroke=\"none\"/>\n"
        ));
    }

    // Reference line at g = 1.
    svg.push_str(&format!(
        "<line x1=\"{:.2}\" y1=\"{:.2}\" x2=\"{:.2}\" y2=\"{:.2}\" \
         stroke=\"#444\" stroke-dasharray=\"6 4\" stroke-width=\"1\"/>\n",
        px(x_lo),
        py(1.0),
        px(x_hi),
        py(1.0)
    ));

    for s in &plot.series {
        let mut d = String::from("M");
        for (i, &x) in plot.x.iter().enumerate() {
            d.push_str(&format!(" {:.2},{:.2}", px(x), py(s.y[i])));
        }
        svg.push_str(&format!(
            "<path d=\"{d}\" fill=\"none\" stroke=\"{}\" stroke-width=\"1.8\"/>\n",
            s.color
        ));
    }

    // Axes.
    svg.push_str(&format!(
        "<line x1=\"{0:.2}\" y1=\"{1:.2}\" x2=\"{2:.2}\" y2=\"{1:.2}\" stroke=\"black\"/>\n\
         <line x1=\"{0:.2}\" y1=\"{3:.2}\" x2=\"{0:.2}\" y2=\"{1:.2}\" stroke=\"black\"/>\n",
        MARGIN_L,
        HEIGHT - MARGIN_B,
        WIDTH - MARGIN_R,
        MARGIN_T
    ));
    for t in nice_ticks(x_lo, x_hi, 8) {
        svg.push_str(&format!(
            "<line x1=\"{0:.2}\" y1=\"{1:.2}\" x2=\"{0:.2}\" y2=\"{2:.2}\" stroke=\"black\"/>\n\
             <text x=\"{0:.2}\" y=\"{3:.2}\" font-size=\"12\" text-anchor=\"middle\">{t}</text>\n",
            px(t),
            HEIGHT - MARGIN_B,
            HEIGHT - MARGIN_B + 6.0,
            HEIGHT - MARGIN_B + 22.0
        ));
    }
    for t in nice_ticks(y_lo, y_hi, 6) {
        svg.push_str(&format!(
            "<line x1=\"{1:.2}\" y1=\"{0:.2}\" x2=\"{2:.2}\" y2=\"{0:.2}\" stroke=\"black\"/>\n\
             <text x=\"{3:.2}\" y=\"{4:.2}\" font-size=\"12\" text-anchor=\"end\">{t:.3}</text>\n",
            py(t),
            MARGIN_L - 6.0,
            MARGIN_L,
            MARGIN_L - 10.0,
            py(t) + 4.0
        ));
    }
    svg.push_str(&format!(
        "<text x=\"{:.2}\" y=\"{:.2}\" font-size=\"14\" text-anchor=\"middle\">r (pixels)</text>\n\
         <text x=\"18\" y=\"{:.2}\" font-size=\"14\" text-anchor=\"middle\" \
         transform=\"rotate(-90 18 {:.2})\">g(r)</text>\n\
         <text x=\"{:.2}\" y=\"20\" font-size=\"15\" text-anchor=\"middle\">{}</text>\n",
        (MARGIN_L + WIDTH - MARGIN_R) / 2.0,
        HEIGHT - 12.0,
        HEIGHT / 2.0,
        HEIGHT / 2.0,
        (MARGIN_L + WIDTH - MARGIN_R) / 2.0,
        xml_escape(plot.title)
    ));

    // Legend.
    let mut ly = MARGIN_T + 12.0;
    let lx = WIDTH - MARGIN_R - 190.0;
    if !plot.band_lo.is_empty() {
        svg.push_str(&format!(
            "<rect x=\"{lx}\" y=\"{:.2}\" width=\"18\" height=\"10\" fill=\"#4a90d9\" \
             fill-opacity=\"0.25\"/><text x=\"{:.2}\" y=\"{:.2}\" font-size=\"12\">{}</text>\n",
            ly - 9.0,
            lx + 24.0,
            ly,
            xml_escape(plot.band_label)
        ));
        ly += 18.0;
    }
    for s in &plot.series {
        svg.push_str(&format!(
            "<line x1=\"{lx}\" y1=\"{0:.2}\" x2=\"{1:.2}\" y2=\"{0:.2}\" stroke=\"{2}\" \
             stroke-width=\"2\"/><text x=\"{3:.2}\" y=\"{4:.2}\" font-size=\"12\">{5}</text>\n",
            ly - 4.0,
            lx + 18.0,
            s.color,
            lx + 24.0,
            ly,
            xml_escape(s.label)
        ));
        ly += 18.0;
    }

    svg.push_str("</svg>\n");
    svg
}

fn xml_escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
