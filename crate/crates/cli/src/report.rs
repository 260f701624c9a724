use std::time::Instant;

use hedonic_core::format::FormatError;
use hedonic_core::{AshgInstance, Error};
use serde::Serialize;

/// Exit codes shared by every subcommand.
pub const EXIT_SOME: u8 = 0;
pub const EXIT_NONE: u8 = 1;
pub const EXIT_RESOURCE: u8 = 2;
pub const EXIT_INPUT: u8 = 3;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Answer {
    Some,
    None,
    Unknown,
}

/// One JSON line on stderr per run.
#[derive(Clone, Debug, Serialize)]
pub struct RunReport {
    pub command: String,
    pub n: usize,
    pub arcs: usize,
    pub max_degree: usize,
    pub max_abs_weight: i64,
    pub width: Option<usize>,
    pub answer: Answer,
    pub wall_ms: f64,
    pub peak_table_size: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

impl RunReport {
    pub fn new(command: &str, instance: &AshgInstance, started: Instant) -> Self {
        RunReport {
            command: command.to_string(),
            n: instance.n(),
            arcs: instance.arcs().len(),
            max_degree: instance.max_degree(),
            max_abs_weight: instance.max_abs_weight(),
            width: None,
            answer: Answer::Unknown,
            wall_ms: started.elapsed().as_secs_f64() * 1e3,
            peak_table_size: None,
            detail: None,
        }
    }

    pub fn answer(mut self, answer: Answer) -> Self {
        self.answer = answer;
        self
    }

    pub fn width(mut self, width: usize) -> Self {
        self.width = Some(width);
        self
    }

    pub fn peak(mut self, peak: usize) -> Self {
        self.peak_table_size = Some(peak);
        self
    }

    pub fn detail(mut self, detail: impl Into<String>) -> Self {
        self.detail = Some(detail.into());
        self
    }

    pub fn emit(&self) {
        eprintln!("{}", serde_json::to_string(self).expect("report serializes"));
    }
}

fn core_code(e: &Error) -> u8 {
    match e {
        Error::ResourceLimit { .. } | Error::CapExceeded(_) => EXIT_RESOURCE,
        _ => EXIT_INPUT,
    }
}

/// Resource and cap errors map to 2; everything else is an input problem.
pub fn classify(err: &anyhow::Error) -> u8 {
    for cause in err.chain() {
        if let Some(e) = cause.downcast_ref::<Error>() {
            return core_code(e);
        }
        if let Some(FormatError::Invalid(e)) = cause.downcast_ref::<FormatError>() {
            return core_code(e);
        }
    }
    EXIT_INPUT
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn classification() {
        assert_eq!(classify(&anyhow::Error::new(Error::ResourceLimit { cap: 1 })), EXIT_RESOURCE);
        assert_eq!(classify(&anyhow::Error::new(Error::CapExceeded("x".into())).context("oracle")), EXIT_RESOURCE);
        assert_eq!(classify(&anyhow::Error::new(Error::SelfArc(0))), EXIT_INPUT);
        assert_eq!(classify(&anyhow::anyhow!("no such file")), EXIT_INPUT);
    }

    #[test]
    fn answers_serialize_uppercase() {
        assert_eq!(serde_json::to_string(&Answer::Unknown).unwrap(), "\"UNKNOWN\"");
    }
}
