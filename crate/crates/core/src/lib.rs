//! Typosquatting analysis: generate look-alike candidates for a domain,
//! attribute suspicious domains to the models that produce them, detect
//! typo domains from visit logs, probe candidates for liveness and plan
//! defensive registrations with DNS blocklist export.
//!
//! ```
//! use typoscope::domain::parse_domain;
//! use typoscope::generation::{generate_all, GenerationConfig};
//!
//! let target = parse_domain("www.example.com").unwrap();
//! let (candidates, report) = generate_all(&target, &GenerationConfig::default()).unwrap();
//! assert!(candidates.iter().any(|c| c.domain.render() == "wwwexample.com"));
//! assert_eq!(report.emitted(), candidates.len());
//! ```

pub mod classify;
pub mod defense;
pub mod domain;
pub mod generation;
pub mod metrics;
pub mod probe;
pub mod resources;
pub mod traffic;

pub use domain::{parse_domain, Domain};
pub use generation::{Candidate, TypoModel};
pub use metrics::{damerau_levenshtein, EditDistance};
