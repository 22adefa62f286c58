//! Static line charts.

use std::fmt::Write;

use crate::config::ExperimentKind;
use crate::runner::Row;

const W: f64 = 720.0;
const H: f64 = 480.0;
const LEFT: f64 = 80.0;
const RIGHT: f64 = 200.0;
const TOP: f64 = 30.0;
const BOTTOM: f64 = 60.0;
const COLORS: [&str; 8] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#e377c2", "#17becf"];

struct Series {
    label: String,
    line: Vec<(f64, f64)>,
    marks: Vec<(f64, f64)>,
}

fn series(rows: &[Row], throughput: bool) -> Vec<Series> {
    let mut out: Vec<Series> = Vec::new();
    for row in rows {
        let label = format!("{} m_c={}", row.system, row.m_c);
        let idx = match out.iter().position(|s| s.label == label) {
            Some(i) => i,
            None => {
                out.push(Series { label, line: Vec::new(), marks: Vec::new() });
                out.len() - 1
            }
        };
        let s = &mut out[idx];
        if throughput {
            if let Some(t) = row.throughput {
                s.line.push((row.x, t));
            }
        } else {
            if let Some(t) = &row.theory {
                s.line.push((row.x, t.p_sys));
            }
            if let Some(e) = &row.sim {
                if e.ber.total > 0.0 {
                    s.marks.push((row.x, e.ber.total));
                }
            }
        }
    }
    out
}

/// Renders BER (log scale) or throughput (linear) against the sweep axis.
pub fn render(kind: ExperimentKind, title: &str, x_label: &str, rows: &[Row]) -> String {
    let throughput = kind == ExperimentKind::ThroughputVsSnr;
    let all = series(rows, throughput);
    let xs: Vec<f64> = rows.iter().map(|r| r.x).collect();
    let (x0, mut x1) = xs.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &x| (a.min(x), b.max(x)));
    if !(x1 > x0) {
        x1 = x0 + 1.0;
    }
    let ys: Vec<f64> = all.iter().flat_map(|s| s.line.iter().chain(&s.marks)).map(|p| p.1).collect();
    let (y0, y1) = if throughput {
        (0.0, 1.1)
    } else {
        let lo = ys.iter().cloned().filter(|&y| y > 0.0).fold(1.0, f64::min).max(1e-12);
        let hi = ys.iter().cloned().fold(lo, f64::max);
        let (a, b) = (lo.log10().floor(), hi.log10().ceil());
        (a, if b > a { b } else { a + 1.0 })
    };
    let pw = W - LEFT - RIGHT;
    let ph = H - TOP - BOTTOM;
    let px = |x: f64| LEFT + (x - x0) / (x1 - x0) * pw;
    let py = |y: f64| {
        let v = if throughput { y } else { y.max(1e-300).log10() };
        TOP + (1.0 - (v - y0) / (y1 - y0)) * ph
    };

    let mut s = String::new();
    let _ = writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" font-family="sans-serif" font-size="12">"#);
    let _ = writeln!(s, r#"<rect width="{W}" height="{H}" fill="white"/>"#);
    let _ = writeln!(s, r#"<text x="{}" y="18" text-anchor="middle" font-size="14">{}</text>"#, LEFT + pw / 2.0, escape(title));
    let _ = writeln!(s, r##"<rect x="{LEFT}" y="{TOP}" width="{pw}" height="{ph}" fill="none" stroke="#333"/>"##);

    if throughput {
        for i in 0..=11 {
            let v = f64::from(i) * 0.1;
            let y = TOP + (1.0 - v / 1.1) * ph;
            let _ = writeln!(s, r##"<line x1="{LEFT}" y1="{y:.1}" x2="{:.1}" y2="{y:.1}" stroke="#ddd"/>"##, LEFT + pw);
            if i % 2 == 0 {
                let _ = writeln!(s, r#"<text x="{}" y="{:.1}" text-anchor="end">{v:.1}</text>"#, LEFT - 6.0, y + 4.0);
            }
        }
    } else {
        let mut d = y0;
        while d <= y1 + 1e-9 {
            let y = TOP + (1.0 - (d - y0) / (y1 - y0)) * ph;
            let _ = writeln!(s, r##"<line x1="{LEFT}" y1="{y:.1}" x2="{:.1}" y2="{y:.1}" stroke="#ddd"/>"##, LEFT + pw);
            let _ = writeln!(s, r#"<text x="{}" y="{:.1}" text-anchor="end">1e{}</text>"#, LEFT - 6.0, y + 4.0, d as i32);
            d += 1.0;
        }
    }
    for i in 0..=5 {
        let v = x0 + (x1 - x0) * f64::from(i) / 5.0;
        let x = px(v);
        let _ = writeln!(s, r##"<line x1="{x:.1}" y1="{TOP}" x2="{x:.1}" y2="{:.1}" stroke="#eee"/>"##, TOP + ph);
        let _ = writeln!(s, r#"<text x="{x:.1}" y="{:.1}" text-anchor="middle">{}</text>"#, TOP + ph + 18.0, trim(v));
    }
    let _ = writeln!(s, r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#, LEFT + pw / 2.0, H - 15.0, escape(x_label));
    let y_label = if throughput { "normalized throughput" } else { "BER" };
    let _ = writeln!(
        s,
        r#"<text x="20" y="{0}" text-anchor="middle" transform="rotate(-90 20 {0})">{y_label}</text>"#,
        TOP + ph / 2.0
    );

    for (i, ser) in all.iter().enumerate() {
        let color = COLORS[i % COLORS.len()];
        if ser.line.len() > 1 {
            let pts: Vec<String> = ser.line.iter().map(|&(x, y)| format!("{:.1},{:.1}", px(x), py(y))).collect();
            let _ = writeln!(s, r#"<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{}"/>"#, pts.join(" "));
        }
        for &(x, y) in ser.marks.iter().chain(if ser.line.len() == 1 { &ser.line[..] } else { &[] }) {
            let _ = writeln!(s, r#"<circle cx="{:.1}" cy="{:.1}" r="3" fill="none" stroke="{color}"/>"#, px(x), py(y));
        }
        let ly = TOP + 10.0 + 18.0 * i as f64;
        let lx = LEFT + pw + 12.0;
        let _ = writeln!(s, r#"<line x1="{lx}" y1="{ly}" x2="{}" y2="{ly}" stroke="{color}" stroke-width="2"/>"#, lx + 20.0);
        let _ = writeln!(s, r#"<text x="{}" y="{}">{}</text>"#, lx + 26.0, ly + 4.0, escape(&ser.label));
    }
    if !throughput {
        let ly = TOP + 10.0 + 18.0 * all.len() as f64 + 8.0;
        let _ = writeln!(s, r##"<text x="{}" y="{ly}" fill="#555">line: theory, o: simulation</text>"##, LEFT + pw + 12.0);
    }
    s.push_str("</svg>\n");
    s
}

fn trim(v: f64) -> String {
    let s = format!("{v:.2}");
    s.trim_end_matches('0').trim_end_matches('.').to_string()
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
