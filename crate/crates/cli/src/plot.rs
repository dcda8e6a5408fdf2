//! Static SVG figures: line charts of sequences and persistence barcodes.

use std::path::Path;

use plotters::prelude::*;

use crate::CliError;

const SIZE: (u32, u32) = (800, 500);
const PALETTE: [RGBColor; 4] = [BLUE, RED, GREEN, MAGENTA];

fn draw_err<E: std::fmt::Debug>(path: &Path) -> impl Fn(E) -> CliError + '_ {
    move |e| CliError::Io(format!("{}: {e:?}", path.display()))
}

fn padded(lo: f64, hi: f64) -> (f64, f64) {
    let (lo, hi) = if lo.is_finite() && hi.is_finite() { (lo, hi) } else { (0.0, 1.0) };
    let pad = ((hi - lo) * 0.05).max(1e-6);
    (lo - pad, hi + pad)
}

/// One chart, one polyline per named series.
pub fn line_chart(path: &Path, title: &str, series: &[(&str, Vec<(f64, f64)>)]) -> Result<(), CliError> {
    let err = draw_err(path);
    let pts = series.iter().flat_map(|(_, s)| s.iter());
    let (mut x0, mut x1, mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    for &(x, y) in pts.filter(|(x, y)| x.is_finite() && y.is_finite()) {
        x0 = x0.min(x);
        x1 = x1.max(x);
        y0 = y0.min(y);
        y1 = y1.max(y);
    }
    let (x0, x1) = padded(x0, x1);
    let (y0, y1) = padded(y0, y1);
    let root = SVGBackend::new(path, SIZE).into_drawing_area();
    root.fill(&WHITE).map_err(&err)?;
    let mut chart = ChartBuilder::on(&root)
        .caption(title, ("sans-serif", 20))
        .margin(10)
        .x_label_area_size(30)
        .y_label_area_size(50)
        .build_cartesian_2d(x0..x1, y0..y1)
        .map_err(&err)?;
    chart.configure_mesh().draw().map_err(&err)?;
    for (i, (name, s)) in series.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        chart
            .draw_series(LineSeries::new(s.iter().cloned(), color))
            .map_err(&err)?
            .label(*name)
            .legend(move |(x, y)| PathElement::new(vec![(x, y), (x + 20, y)], color));
    }
    chart
        .configure_series_labels()
        .background_style(WHITE.mix(0.8))
        .border_style(BLACK)
        .draw()
        .map_err(&err)?;
    root.present().map_err(&err)?;
    Ok(())
}

/// Finite bars stacked vertically; essential classes drawn to the right edge.
pub fn barcode(path: &Path, title: &str, bars: &[(f64, f64)], essential: &[f64]) -> Result<(), CliError> {
    let err = draw_err(path);
    let lo = bars.iter().map(|b| b.0).chain(essential.iter().cloned()).fold(f64::INFINITY, f64::min);
    let hi = bars.iter().map(|b| b.1).chain(essential.iter().cloned()).fold(f64::NEG_INFINITY, f64::max);
    let (x0, x1) = padded(lo, hi);
    let rows = (bars.len() + essential.len()).max(1) as f64;
    let root = SVGBackend::new(path, SIZE).into_drawing_area();
    root.fill(&WHITE).map_err(&err)?;
    let mut chart = ChartBuilder::on(&root)
        .caption(title, ("sans-serif", 20))
        .margin(10)
        .x_label_area_size(30)
        .y_label_area_size(30)
        .build_cartesian_2d(x0..x1, 0.0..rows + 1.0)
        .map_err(&err)?;
    chart.configure_mesh().disable_y_mesh().draw().map_err(&err)?;
    let finite = bars
        .iter()
        .enumerate()
        .map(|(i, &(b, d))| PathElement::new(vec![(b, i as f64 + 1.0), (d, i as f64 + 1.0)], BLUE.stroke_width(3)));
    chart.draw_series(finite).map_err(&err)?;
    let offset = bars.len() as f64 + 1.0;
    let infinite = essential
        .iter()
        .enumerate()
        .map(|(i, &b)| PathElement::new(vec![(b, offset + i as f64), (x1, offset + i as f64)], RED.stroke_width(3)));
    chart.draw_series(infinite).map_err(&err)?;
    root.present().map_err(&err)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn writes_svg() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("a.svg");
        line_chart(&p, "ratios", &[("a", vec![(1.0, 0.5), (2.0, 0.25)]), ("b", vec![(1.0, 1.0)])]).unwrap();
        assert!(std::fs::read_to_string(&p).unwrap().starts_with("<svg"));
        let q = dir.path().join("b.svg");
        barcode(&q, "bars", &[(0.0, 1.0), (0.2, 0.4)], &[-1.0]).unwrap();
        barcode(&q, "empty", &[], &[]).unwrap();
        assert!(std::fs::read_to_string(&q).unwrap().contains("</svg>"));
    }
}
