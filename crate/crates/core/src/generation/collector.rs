use std::collections::HashSet;

use crate::domain::{Domain, Suffix};
use crate::metrics::damerau_levenshtein;

use super::{Candidate, ModelOutput, ModelReport, TypoModel};

/// Accumulates one model's candidates: validates, drops identities,
/// deduplicates and keeps the report counters in step.
pub(crate) struct Collector<'a> {
    pub source: &'a Domain,
    pub name: String,
    source_text: String,
    model: TypoModel,
    /// Outputs closer than this (Damerau-Levenshtein) are dropped as shortcuts.
    min_distance: Option<usize>,
    seen: HashSet<String>,
    out: Vec<Candidate>,
    report: ModelReport,
}

impl<'a> Collector<'a> {
    pub fn new(source: &'a Domain, model: TypoModel) -> Self {
        Collector {
            source,
            name: source.name(),
            source_text: source.render(),
            model,
            min_distance: None,
            seen: HashSet::new(),
            out: Vec::new(),
            report: ModelReport::new(model),
        }
    }

    pub fn require_distance(&mut self, k: usize) {
        self.min_distance = Some(k);
    }

    /// Offer an edited name portion under the source TLD.
    pub fn offer(&mut self, name: &str, describe: impl FnOnce() -> String) {
        self.offer_with_tld(name, None, describe)
    }

    pub fn offer_with_tld(
        &mut self,
        name: &str,
        tld: Option<&Suffix>,
        describe: impl FnOnce() -> String,
    ) {
        self.report.raw += 1;
        let domain = match Domain::from_name(name, tld.unwrap_or(self.source.tld())) {
            Ok(d) => d,
            Err(_) => {
                self.report.invalid += 1;
                return;
            }
        };
        let rendered = domain.render();
        if rendered == self.source_text {
            self.report.identical += 1;
            return;
        }
        if let Some(k) = self.min_distance {
            if damerau_levenshtein(&rendered, &self.source_text).value() < k {
                self.report.shortcut += 1;
                return;
            }
        }
        if !self.seen.insert(rendered) {
            self.report.duplicate += 1;
            return;
        }
        self.report.emitted += 1;
        self.out.push(Candidate {
            domain,
            model: self.model,
            edit_description: describe(),
            source: self.source.clone(),
        });
    }

    /// Count an attempted edit that is known to be invalid without building it.
    pub fn reject_invalid(&mut self) {
        self.report.raw += 1;
        self.report.invalid += 1;
    }

    /// Count an attempted edit that is known to reproduce the source.
    pub fn reject_identical(&mut self) {
        self.report.raw += 1;
        self.report.identical += 1;
    }

    pub fn finish(self) -> ModelOutput {
        ModelOutput {
            candidates: self.out,
            report: self.report,
        }
    }
}
