//! Static SVG figure: recovery curves on the left, profiles at the middle
//! budget of the grid on the right.

use std::fmt::Write;

use crate::experiment::ExperimentOutput;

const PALETTE: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"];
const W: f64 = 420.0;
const H: f64 = 300.0;
const PAD: f64 = 48.0;

struct Panel {
    x0: f64,
    xmin: f64,
    xmax: f64,
    ymin: f64,
    ymax: f64,
}

impl Panel {
    fn px(&self, x: f64) -> f64 {
        let span = (self.xmax - self.xmin).max(f64::MIN_POSITIVE);
        self.x0 + PAD + (x - self.xmin) / span * (W - 2.0 * PAD)
    }

    fn py(&self, y: f64) -> f64 {
        let span = (self.ymax - self.ymin).max(f64::MIN_POSITIVE);
        H - PAD - (y - self.ymin) / span * (H - 2.0 * PAD)
    }

    fn axes(&self, svg: &mut String, xlabel: &str, ylabel: &str) {
        let (l, r, t, b) = (self.x0 + PAD, self.x0 + W - PAD, PAD, H - PAD);
        let _ = write!(svg, r#"<rect x="{l}" y="{t}" width="{}" height="{}" fill="none" stroke="black"/>"#, r - l, b - t);
        for k in 0..=4 {
            let fx = self.xmin + (self.xmax - self.xmin) * k as f64 / 4.0;
            let fy = self.ymin + (self.ymax - self.ymin) * k as f64 / 4.0;
            let _ = write!(svg, r#"<text x="{:.1}" y="{}" font-size="10" text-anchor="middle">{}</text>"#, self.px(fx), b + 14.0, tick(fx));
            let _ = write!(svg, r#"<text x="{}" y="{:.1}" font-size="10" text-anchor="end">{}</text>"#, l - 4.0, self.py(fy) + 3.0, tick(fy));
        }
        let _ = write!(svg, r#"<text x="{}" y="{}" font-size="12" text-anchor="middle">{xlabel}</text>"#, (l + r) / 2.0, H - 10.0);
        let _ = write!(
            svg,
            r#"<text x="{}" y="{}" font-size="12" text-anchor="middle" transform="rotate(-90 {} {})">{ylabel}</text>"#,
            self.x0 + 14.0,
            (t + b) / 2.0,
            self.x0 + 14.0,
            (t + b) / 2.0
        );
    }
}

fn tick(v: f64) -> String {
    if v.abs() >= 10.0 || v == v.round() { format!("{v:.0}") } else { format!("{v:.2}") }
}

fn polyline(svg: &mut String, points: &[(f64, f64)], color: &str) {
    let pts: Vec<String> = points.iter().map(|(x, y)| format!("{x:.2},{y:.2}")).collect();
    let _ = write!(svg, r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="1.5"/>"#, pts.join(" "));
}

pub fn render(out: &ExperimentOutput) -> String {
    let spec = &out.spec;
    let mut svg = String::new();
    let _ = write!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{}" height="{H}" font-family="sans-serif">"#,
        2.0 * W
    );
    let _ = write!(svg, r#"<rect width="{}" height="{H}" fill="white"/>"#, 2.0 * W);

    let (m0, m1) = (*spec.m_grid.first().unwrap() as f64, *spec.m_grid.last().unwrap() as f64);
    let curves = Panel { x0: 0.0, xmin: m0, xmax: m1, ymin: 0.0, ymax: 1.0 };
    curves.axes(&mut svg, "m", "probability of recovery");
    for (k, curve) in out.curves.iter().enumerate() {
        let color = PALETTE[k % PALETTE.len()];
        let pts: Vec<(f64, f64)> = curve.rows.iter().map(|r| (curves.px(r.m as f64), curves.py(r.epsilon))).collect();
        polyline(&mut svg, &pts, color);
        for (x, y) in &pts {
            let _ = write!(svg, r#"<circle cx="{x:.2}" cy="{y:.2}" r="2.5" fill="{color}"/>"#);
        }
        let ly = PAD + 14.0 + 14.0 * k as f64;
        let _ = write!(svg, r#"<text x="{}" y="{ly}" font-size="11" fill="{color}">{}</text>"#, W - PAD - 90.0, curve.arm);
    }

    let mid = spec.m_grid[spec.m_grid.len() / 2];
    let pmax = out
        .profiles
        .iter()
        .flat_map(|a| a.profiles.iter().filter(|(m, _)| *m == mid).flat_map(|(_, p)| p.iter().cloned()))
        .fold(0.0, f64::max);
    let profiles = Panel { x0: W, xmin: 0.0, xmax: (spec.n - 1) as f64, ymin: 0.0, ymax: pmax.max(1e-12) };
    profiles.axes(&mut svg, &format!("index (m = {mid})"), "p");
    for (k, arm) in out.profiles.iter().enumerate() {
        if let Some((_, p)) = arm.profiles.iter().find(|(m, _)| *m == mid) {
            let pts: Vec<(f64, f64)> =
                p.iter().enumerate().map(|(i, &v)| (profiles.px(i as f64), profiles.py(v))).collect();
            polyline(&mut svg, &pts, PALETTE[k % PALETTE.len()]);
        }
    }
    svg.push_str("</svg>\n");
    svg
}
