//! The four linear-penalty cases of the Azcue–Muler model.

use std::io::{self, Write};

use levyband_core::{multi_band_recursion, GerberShiu, Penalty, Result, RiskModel, ScaleBasis};

pub const SLOPES: [f64; 4] = [0.0, 0.2, 0.6, 1.0];

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Row {
    pub c: f64,
    /// Top of the first band.
    pub b1: f64,
    /// `v(b) − b` at the top `b` of the highest nonempty band.
    pub v2: f64,
    /// Second band, when there is one.
    pub a2: Option<f64>,
    pub b2: Option<f64>,
}

pub fn row(basis: &ScaleBasis, c: f64) -> Result<Row> {
    let gs = GerberShiu::new(basis, Penalty::Affine { c, c0: 0.0 })?;
    let (levels, v) = multi_band_recursion(&gs, 0.0, None)?;
    let bands = &levels.strategy.bands;
    let top = v.top();
    Ok(Row {
        c,
        b1: bands[0].b_plus,
        v2: v.evaluate(top) - top,
        a2: bands.get(1).map(|b| b.a),
        b2: bands.get(1).map(|b| b.b_plus),
    })
}

pub fn rows(model: &RiskModel) -> Result<Vec<Row>> {
    let basis = ScaleBasis::new(model)?;
    SLOPES.iter().map(|&c| row(&basis, c)).collect()
}

pub fn print(out: &mut dyn Write, rows: &[Row]) -> io::Result<()> {
    let opt = |x: Option<f64>| x.map_or("-".to_string(), |v| format!("{v:.3}"));
    writeln!(out, "{:>5} {:>9} {:>9} {:>9} {:>9}", "c", "b1", "v2", "a2", "b2")?;
    for r in rows {
        writeln!(
            out,
            "{:>5.1} {:>9.3} {:>9.3} {:>9} {:>9}",
            r.c,
            r.b1,
            r.v2,
            opt(r.a2),
            opt(r.b2)
        )?;
    }
    Ok(())
}
