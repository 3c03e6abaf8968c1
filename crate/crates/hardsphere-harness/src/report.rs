//! Experiment reports: config echo, per-statistic estimates, and verdicts
//! against the pre-registered tolerances.

use hardsphere_core::partition::Estimate;

#[derive(Clone, Debug)]
pub struct Verdict {
    pub name: String,
    pub pass: bool,
    /// The tolerance the verdict was taken at, echoed for the report.
    pub tolerance: String,
    pub detail: String,
}

impl Verdict {
    pub fn new(name: &str, pass: bool, tolerance: &str, detail: String) -> Self {
        Verdict { name: name.to_string(), pass, tolerance: tolerance.to_string(), detail }
    }
}

#[derive(Clone, Debug, Default)]
pub struct ExperimentReport {
    pub experiment: String,
    pub config_echo: Vec<(String, String)>,
    pub statistics: Vec<(String, Estimate)>,
    pub verdicts: Vec<Verdict>,
    pub wall_ms: u128,
    pub replicas: u64,
}

impl ExperimentReport {
    pub fn passed(&self) -> bool {
        self.verdicts.iter().all(|v| v.pass)
    }

    pub fn push_stat(&mut self, name: &str, est: Estimate) {
        self.statistics.push((name.to_string(), est));
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("== experiment: {} ==\n", self.experiment));
        for (k, v) in &self.config_echo {
            out.push_str(&format!("  config {k} = {v}\n"));
        }
        for (name, est) in &self.statistics {
            out.push_str(&format!(
                "  stat {name}: {:.6} +- {:.6} (n = {}, {:?})\n",
                est.mean, est.std_error, est.n_samples, est.method
            ));
        }
        for v in &self.verdicts {
            out.push_str(&format!(
                "  verdict {}: {} [{}] {}\n",
                v.name,
                if v.pass { "PASS" } else { "FAIL" },
                v.tolerance,
                v.detail
            ));
        }
        let secs = self.wall_ms as f64 / 1000.0;
        let rate = if secs > 0.0 { self.replicas as f64 / secs } else { f64::NAN };
        out.push_str(&format!(
            "  wall {:.2}s, {} replicas ({:.0} replicas/s)\n  overall: {}\n",
            secs,
            self.replicas,
            rate,
            if self.passed() { "PASS" } else { "FAIL" }
        ));
        out
    }
}
