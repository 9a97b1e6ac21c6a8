use meterent::measures::{
    bell_max, bell_max_from_overlaps, concurrence, concurrence_expectation, concurrence_from_overlaps, eof,
};
use meterent::model::{alpha_tilde, Level, ModelParams};
use meterent::state::{assemble_from_overlaps, meter_basis, purity, MeterBasis, PointerOverlaps};
use meterent::Result;
use serde::Serialize;
use serde_json::{Map, Value};

use crate::config::RunConfig;

/// Every derived quantity at one time sample. The closed-form and
/// matrix-numeric columns are computed independently.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrajectoryRecord {
    pub r: f64,
    pub t: f64,
    pub gamma_t_half: f64,
    /// Pointer amplitude of the upper level; the lower one is its negative.
    pub alpha_tilde: f64,
    pub p_overlap: f64,
    pub gamma12: f64,
    pub decoherence_factor: f64,
    pub c_closed: f64,
    pub c_wootters: f64,
    pub c_expectation: f64,
    pub eof: f64,
    pub bell_max_closed: f64,
    pub bell_max_horodecki: f64,
    pub purity: f64,
}

impl TrajectoryRecord {
    pub fn at(params: &ModelParams, t: f64) -> Result<Self> {
        let ov = PointerOverlaps::at(params, t)?;
        let state = assemble_from_overlaps(&params.rho0, &ov);
        let basis = if ov.is_degenerate() { MeterBasis::degenerate_limit() } else { meter_basis(params, t)? };
        let c_wootters = concurrence(&state)?;
        Ok(Self {
            r: params.r,
            t,
            gamma_t_half: params.scaled_time(t),
            alpha_tilde: alpha_tilde(params, t, Level::Two)?.re,
            p_overlap: ov.p(),
            gamma12: ov.gamma12,
            decoherence_factor: ov.coherence(),
            c_closed: concurrence_from_overlaps(&ov),
            c_wootters,
            c_expectation: concurrence_expectation(&state, &basis),
            eof: eof(c_wootters)?,
            bell_max_closed: bell_max_from_overlaps(&ov),
            bell_max_horodecki: bell_max(&state)?,
            purity: purity(&state),
        })
    }

    pub fn to_row(&self) -> Row {
        match serde_json::to_value(self) {
            Ok(Value::Object(map)) => map,
            _ => unreachable!("a struct of numbers serializes to an object"),
        }
    }
}

pub type Row = Map<String, Value>;

/// Records for one squeeze value, in time order.
pub fn sweep(config: &RunConfig, r: f64) -> Result<Vec<TrajectoryRecord>> {
    let params = config.params(r)?;
    config.times().into_iter().map(|t| TrajectoryRecord::at(&params, t)).collect()
}

/// One record per time sample per squeeze value, grouped by squeeze value.
pub fn trajectory(config: &RunConfig) -> Result<Vec<TrajectoryRecord>> {
    config.validate()?;
    let mut out = Vec::with_capacity(config.r_list.len() * config.n_steps);
    for &r in &config.r_list {
        out.extend(sweep(config, r)?);
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Figure {
    /// Decoherence factor against time.
    Fig3,
    /// Concurrence and entanglement of formation against time.
    Fig4,
    /// Maximal Bell violation, plus the difference columns of the pair
    /// [`DIFFERENCE_PAIR`].
    Fig5,
}

/// Squeeze values whose concurrence and Bell differences `fig5` reports.
pub const DIFFERENCE_PAIR: (f64, f64) = (2.0, 3.5);

fn number(x: f64) -> Value {
    Value::from(x)
}

/// Wide table with a `t` and `gamma_t_half` column followed by one column
/// per quantity and squeeze value, suffixed `_r<value>`.
pub fn figure(which: Figure, config: &RunConfig) -> Result<Vec<Row>> {
    config.validate()?;
    let runs: Vec<(f64, Vec<TrajectoryRecord>)> =
        config.r_list.iter().map(|&r| Ok((r, sweep(config, r)?))).collect::<Result<_>>()?;
    let pair = if which == Figure::Fig5 {
        Some((sweep(config, DIFFERENCE_PAIR.0)?, sweep(config, DIFFERENCE_PAIR.1)?))
    } else {
        None
    };

    let mut rows = Vec::with_capacity(config.n_steps);
    for (k, &t) in config.times().iter().enumerate() {
        let mut row = Row::new();
        row.insert("t".into(), number(t));
        row.insert("gamma_t_half".into(), number(runs[0].1[k].gamma_t_half));
        for (r, recs) in &runs {
            let rec = &recs[k];
            match which {
                Figure::Fig3 => {
                    row.insert(format!("decoherence_factor_r{r}"), number(rec.decoherence_factor));
                }
                Figure::Fig4 => {
                    row.insert(format!("c_r{r}"), number(rec.c_closed));
                    row.insert(format!("eof_r{r}"), number(rec.eof));
                }
                Figure::Fig5 => {
                    row.insert(format!("bell_max_r{r}"), number(rec.bell_max_closed));
                }
            }
        }
        if let Some((a, b)) = &pair {
            row.insert("c_dif".into(), number(a[k].c_closed - b[k].c_closed));
            row.insert("b_dif".into(), number(a[k].bell_max_closed - b[k].bell_max_closed));
            row.insert("purity_dif".into(), number(a[k].purity - b[k].purity));
        }
        rows.push(row);
    }
    Ok(rows)
}
