//! CSV artifacts. Every solver writes the same columns
//! `t,x,sigma,v,u,p,d_sigma,energy_residual`; stationary output appends
//! `boundary_gap`.

use std::io::Write;

use serde::Serialize;

use crate::dynamic::RunOutput;
use crate::exact::{EvolutionaryExact, StationaryExact};
use crate::quasistatic::{QsTrajectory, StationarySolution};
use crate::scenario::{Grid1D, Scenario};

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Row {
    pub t: f64,
    pub x: f64,
    pub sigma: f64,
    pub v: f64,
    pub u: f64,
    pub p: f64,
    pub d_sigma: f64,
    pub energy_residual: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct StationaryRow {
    pub t: f64,
    pub x: f64,
    pub sigma: f64,
    pub v: f64,
    pub u: f64,
    pub p: f64,
    pub d_sigma: f64,
    pub energy_residual: f64,
    pub boundary_gap: f64,
}

pub fn write_rows<W: Write, R: Serialize>(out: W, rows: impl IntoIterator<Item = R>) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

/// Snapshot rows (every node at each snapshot time) followed by probe rows
/// (every step), sorted by time then position.
pub fn dynamic_rows(grid: &Grid1D, run: &RunOutput) -> Vec<Row> {
    let mut rows = Vec::new();
    for s in &run.snapshots {
        for (k, &x) in grid.x().iter().enumerate() {
            rows.push(Row {
                t: s.t,
                x,
                sigma: s.sigma[k],
                v: s.v[k],
                u: s.u[k],
                p: s.p[k],
                d_sigma: s.distance[k],
                energy_residual: s.energy_residual,
            });
        }
    }
    for probe in &run.probes {
        for (j, &t) in probe.t.iter().enumerate() {
            rows.push(Row {
                t,
                x: probe.x,
                sigma: probe.sigma[j],
                v: probe.v[j],
                u: probe.u[j],
                p: probe.p[j],
                d_sigma: probe.distance[j],
                energy_residual: run.ledger_history[j].residual,
            });
        }
    }
    rows.sort_by(|a, b| a.t.total_cmp(&b.t).then(a.x.total_cmp(&b.x)));
    rows
}

/// Rows of a quasi-static trajectory at the requested times (nearest record).
pub fn quasistatic_rows(scenario: &Scenario, tr: &QsTrajectory, times: &[f64]) -> Vec<Row> {
    let pot = scenario.scalar_potential();
    let mut rows = Vec::new();
    for &t in times {
        let j = tr.t.partition_point(|&s| s < t).min(tr.t.len() - 1);
        let (sigma, v, u, p) = tr.fields(scenario, j);
        for (k, &x) in scenario.grid().x().iter().enumerate() {
            rows.push(Row {
                t: tr.t[j],
                x,
                sigma: sigma[k],
                v: v[k],
                u: u[k],
                p: p[k],
                d_sigma: pot.distance(sigma[k]),
                energy_residual: tr.energy_residual[j],
            });
        }
    }
    rows
}

pub fn stationary_rows(scenario: &Scenario, sol: &StationarySolution, boundary_gap: f64) -> Vec<StationaryRow> {
    let pot = scenario.scalar_potential();
    (0..sol.x.len())
        .map(|k| StationaryRow {
            t: 0.0,
            x: sol.x[k],
            sigma: sol.sigma[k],
            v: 0.0,
            u: sol.u[k],
            p: sol.plastic[k],
            d_sigma: pot.distance(sol.sigma[k]),
            energy_residual: 0.0,
            boundary_gap,
        })
        .collect()
}

/// Closed-form fields on `nodes` points at each of `times`.
pub fn evolutionary_rows(ee: &EvolutionaryExact, nodes: usize, times: &[f64]) -> Vec<Row> {
    let mut rows = Vec::new();
    for &t in times {
        for k in 0..nodes {
            let x = ee.length * k as f64 / (nodes - 1) as f64;
            let e = ee.eval(t, x);
            rows.push(Row { t, x, sigma: e.sigma, v: e.v, u: e.u, p: e.p, d_sigma: 0.0, energy_residual: 0.0 });
        }
    }
    rows
}

pub fn stationary_exact_rows(se: &StationaryExact, nodes: usize) -> Vec<StationaryRow> {
    let gap = se.atom();
    (0..nodes)
        .map(|k| {
            let x = se.length * k as f64 / (nodes - 1) as f64;
            let e = se.eval(x);
            StationaryRow { t: 0.0, x, sigma: e.sigma, v: 0.0, u: e.u, p: 0.0, d_sigma: 0.0, energy_residual: 0.0, boundary_gap: -gap }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn header_and_schema() {
        let ee = EvolutionaryExact::new(1.0, 0.5, 2.0).unwrap();
        let mut buf = Vec::new();
        write_rows(&mut buf, evolutionary_rows(&ee, 3, &[0.0])).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), "t,x,sigma,v,u,p,d_sigma,energy_residual");
        assert_eq!(lines.count(), 3);
        let mut buf = Vec::new();
        write_rows(&mut buf, stationary_exact_rows(&StationaryExact::new(1.0, 1.0).unwrap(), 2)).unwrap();
        assert!(String::from_utf8(buf).unwrap().starts_with("t,x,sigma,v,u,p,d_sigma,energy_residual,boundary_gap\n"));
    }
}
