//! CSV assembly and result formatting.
//!
//! Numbers render with 17 significant digits so identical runs produce
//! byte-identical files and downstream plots can be diffed exactly.

use covert_irs::channel::ChannelParams;
use covert_irs::covertness::PhaseVector;
use covert_irs::solve::{Classification, SolveStatus};

/// Full-precision decimal rendering for every real-valued CSV cell.
pub fn num(v: f64) -> String {
    format!("{v:.16e}")
}

/// Columns echoing the complete parameter tuple; every CSV row starts
/// with these so each row is self-describing.
pub const PARAM_COLUMNS: &str =
    "n_elements,sigma_as,sigma_sw,sigma_sb,sigma_aw,sigma_ab,noise_var_w,noise_var_b,tx_power,seed";

pub fn param_cells(p: &ChannelParams) -> String {
    format!(
        "{},{},{},{},{},{},{},{},{},{}",
        p.n_elements(),
        num(p.sigma_as()),
        num(p.sigma_sw()),
        num(p.sigma_sb()),
        num(p.sigma_aw()),
        num(p.sigma_ab()),
        num(p.noise_var_w()),
        num(p.noise_var_b()),
        num(p.tx_power()),
        p.seed(),
    )
}

pub fn status_name(s: SolveStatus) -> &'static str {
    match s {
        SolveStatus::Converged => "converged",
        SolveStatus::Infeasible => "infeasible",
        SolveStatus::MaxIterations => "max-iterations",
        SolveStatus::SaddleDetected => "saddle-detected",
    }
}

pub fn classification_name(c: Classification) -> &'static str {
    match c {
        Classification::GlobalMinimum => "global-minimum",
        Classification::StrictSaddle => "strict-saddle",
        Classification::GlobalMaximum => "global-maximum",
        Classification::NonCritical => "non-critical",
    }
}

/// Semicolon-joined phase list (stays inside one CSV cell).
pub fn phase_cell(phases: &PhaseVector) -> String {
    phases.iter().map(|&p| num(p)).collect::<Vec<_>>().join(";")
}

/// A CSV document under construction: header row plus data rows.
pub struct Csv {
    lines: Vec<String>,
}

impl Csv {
    pub fn new(columns: String) -> Self {
        Csv { lines: vec![columns] }
    }

    pub fn push(&mut self, row: String) {
        debug_assert_eq!(
            row.matches(',').count(),
            self.lines[0].matches(',').count(),
            "row width must match header"
        );
        self.lines.push(row);
    }

    pub fn rows(&self) -> usize {
        self.lines.len() - 1
    }

    pub fn render(&self) -> String {
        let mut out = self.lines.join("\n");
        out.push('\n');
        out
    }
}
