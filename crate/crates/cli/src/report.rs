//! Serialization of run outputs.
//!
//! Summary: one `check` record per oracle comparison, key=value fields,
//! machine readable line by line. Time series: CSV with a header row and
//! `#`-prefixed provenance comments. Floats are written with a fixed format
//! so identical runs produce identical bytes.

use rodsim_core::observables::{EnsembleAccumulator, OracleReport};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Clone, Debug)]
pub struct RunMeta {
    pub config_hash: String,
    pub seed: u64,
}

fn fmt(x: f64) -> String {
    format!("{x:.6e}")
}

pub fn format_summary(checks: &[OracleReport], meta: &RunMeta, n_trajectories: u64) -> String {
    let mut out = String::new();
    out.push_str(&format!("# rodsim summary v{VERSION}\n"));
    out.push_str(&format!(
        "# config={} seed={} trajectories={}\n",
        meta.config_hash, meta.seed, n_trajectories
    ));
    let mut all = true;
    for c in checks {
        all &= c.pass;
        out.push_str(&format!(
            "check id={} estimate={} oracle={} tolerance={} pass={}\n",
            c.id,
            fmt(c.estimate),
            fmt(c.oracle),
            fmt(c.tolerance),
            c.pass
        ));
    }
    out.push_str(&format!("overall pass={} checks={}\n", all, checks.len()));
    out
}

pub fn format_timeseries(acc: &EnsembleAccumulator, meta: &RunMeta) -> String {
    let mut out = String::new();
    out.push_str(&format!(
        "# rodsim v{VERSION} config={} seed={}\n",
        meta.config_hash, meta.seed
    ));
    out.push_str("t,msd,orient_corr,du2,p_par_sq,p_perp_sq,omega_sq,energy\n");
    let msd = acc.msd();
    let corr = acc.orient_corr();
    let du2 = acc.du2();
    let p_par = acc.p_par_sq();
    let p_perp = acc.p_perp_sq();
    let omega = acc.omega_sq();
    let energy = acc.energy();
    for (i, t) in acc.lag_times().iter().enumerate() {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{}\n",
            fmt(*t),
            fmt(msd[i]),
            fmt(corr[i]),
            fmt(du2[i]),
            fmt(p_par[i]),
            fmt(p_perp[i]),
            fmt(omega[i]),
            fmt(energy[i])
        ));
    }
    out
}

pub fn format_kernel_table(taus: &[f64], values: &[f64], meta: &RunMeta) -> String {
    let mut out = String::new();
    out.push_str(&format!(
        "# rodsim kernel table v{VERSION} config={} seed={}\n",
        meta.config_hash, meta.seed
    ));
    out.push_str("tau,c\n");
    for (t, c) in taus.iter().zip(values) {
        out.push_str(&format!("{},{}\n", fmt(*t), fmt(*c)));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn summary_reports_every_check_and_the_verdict() {
        let checks = vec![
            OracleReport::relative("a", 1.0, 1.0, 0.05),
            OracleReport::relative("b", 2.0, 1.0, 0.05),
        ];
        let meta = RunMeta {
            config_hash: "deadbeef".into(),
            seed: 7,
        };
        let s = format_summary(&checks, &meta, 100);
        assert!(s.contains("check id=a"));
        assert!(s.contains("pass=false"));
        assert!(s.contains("overall pass=false checks=2"));
        assert!(s.contains("config=deadbeef seed=7"));
    }

    #[test]
    fn float_format_is_stable() {
        assert_eq!(fmt(4.0), "4.000000e0");
        assert_eq!(fmt(0.02), "2.000000e-2");
    }
}
