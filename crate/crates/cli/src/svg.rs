//! Deterministic SVG rendering of a barcode window.

use std::fmt::Write;

use sbar_core::field::{format_rational, rational_to_f64};
use sbar_core::{Barcode, Extended, Rational};

const WIDTH: f64 = 800.0;
const MARGIN_LEFT: f64 = 70.0;
const MARGIN_RIGHT: f64 = 30.0;
const TOP: f64 = 30.0;
const TRACK: f64 = 14.0;
const GROUP_GAP: f64 = 18.0;

/// Bars meeting `[lo, hi]`, grouped by degree with one track per bar. Bars
/// running past `hi` and infinite bars end at the frame; infinite ones carry an
/// open chevron instead of an end cap.
pub fn render(barcode: &Barcode, lo: &Rational, hi: &Rational) -> String {
    let (x0, x1) = (rational_to_f64(lo), rational_to_f64(hi));
    let span = (x1 - x0).max(f64::MIN_POSITIVE);
    let plot = WIDTH - MARGIN_LEFT - MARGIN_RIGHT;
    let sx = |t: f64| MARGIN_LEFT + (t.clamp(x0, x1) - x0) / span * plot;

    let visible: Vec<_> = barcode
        .expanded()
        .into_iter()
        .filter(|b| {
            &b.birth <= hi
                && match &b.death {
                    Extended::Finite(d) => d > lo,
                    Extended::Infinite => true,
                }
        })
        .collect();
    let mut degrees: Vec<i64> = visible.iter().map(|b| b.degree).collect();
    degrees.dedup();

    let tracks = visible.len() as f64;
    let height = TOP + tracks * TRACK + degrees.len() as f64 * GROUP_GAP + 30.0;
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH:.0}" height="{height:.0}" viewBox="0 0 {WIDTH:.0} {height:.0}">"#
    );
    let _ = writeln!(
        s,
        r#"<style>.bar{{fill:#1f4e79}}.grid{{stroke:#bbb;stroke-width:1}}.open-end{{fill:none;stroke:#1f4e79;stroke-width:2}}text{{font:11px sans-serif}}</style>"#
    );
    let bottom = height - 20.0;
    let first = x0.ceil() as i64;
    let last = x1.floor() as i64;
    for k in first..=last {
        let x = sx(k as f64);
        let _ = writeln!(s, r#"<line class="grid" x1="{x:.2}" y1="{TOP:.2}" x2="{x:.2}" y2="{bottom:.2}"/>"#);
        let _ = writeln!(s, r#"<text x="{x:.2}" y="{:.2}" text-anchor="middle">{k}</text>"#, bottom + 14.0);
    }

    let mut y = TOP;
    for deg in degrees {
        y += GROUP_GAP;
        let _ = writeln!(s, r#"<text x="8" y="{:.2}">deg {deg}</text>"#, y - 4.0);
        for b in visible.iter().filter(|b| b.degree == deg) {
            let start = sx(rational_to_f64(&b.birth));
            let end = match &b.death {
                Extended::Finite(d) => sx(rational_to_f64(d)),
                Extended::Infinite => sx(x1),
            };
            let death = match &b.death {
                Extended::Finite(d) => format_rational(d),
                Extended::Infinite => "inf".into(),
            };
            let _ = writeln!(
                s,
                r#"<rect class="bar" data-birth="{}" data-death="{death}" x="{start:.2}" y="{:.2}" width="{:.2}" height="{:.2}"/>"#,
                format_rational(&b.birth),
                y + 2.0,
                (end - start).max(0.5),
                TRACK - 4.0
            );
            if b.death.is_infinite() {
                let (cy, h) = (y + TRACK / 2.0, TRACK / 2.0 - 1.0);
                let _ = writeln!(
                    s,
                    r#"<polyline class="open-end" points="{:.2},{:.2} {:.2},{cy:.2} {:.2},{:.2}"/>"#,
                    end,
                    cy - h,
                    end + 6.0,
                    end,
                    cy + h
                );
            }
            y += TRACK;
        }
    }
    s.push_str("</svg>\n");
    s
}
