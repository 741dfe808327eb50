//! Liveness probing: does a candidate resolve to an address?
//!
//! Lookups go through the [`Resolver`] trait so tests and offline runs use
//! a [`FixtureResolver`]; the `live` feature adds a DNS-backed resolver.

use std::collections::HashMap;
use std::net::IpAddr;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::{SystemTime, UNIX_EPOCH};

use serde::Serialize;
use thiserror::Error;

use crate::domain::{content_lines, parse_domain, Domain};

pub const DEFAULT_MAX_IN_FLIGHT: usize = 32;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ProbeError {
    #[error("no results to summarize")]
    EmptyInput,
    #[error("fixture line {line}: {reason}")]
    BadFixture { line: usize, reason: String },
    #[error("resolver setup failed: {0}")]
    Setup(String),
}

/// Answers name-to-address queries. An empty answer means "does not resolve".
pub trait Resolver: Sync {
    fn resolve(&self, name: &Domain) -> Result<Vec<IpAddr>, String>;
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProbeResult {
    pub candidate: Domain,
    pub resolved: bool,
    pub addresses: Vec<String>,
    pub queried_at: f64,
    pub error: Option<String>,
}

impl ProbeResult {
    /// `candidate,resolved,addresses,timestamp` with `;`-joined addresses.
    pub fn to_line(&self) -> String {
        format!(
            "{},{},{},{}",
            self.candidate,
            self.resolved,
            self.addresses.join(";"),
            self.queried_at
        )
    }
}

/// Seconds since the Unix epoch.
pub fn system_clock() -> f64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs_f64())
        .unwrap_or(0.0)
}

/// Probe with the system clock.
pub fn probe_batch(
    candidates: &[Domain],
    resolver: &dyn Resolver,
    max_in_flight: usize,
) -> Vec<ProbeResult> {
    probe_batch_with_clock(candidates, resolver, max_in_flight, &system_clock)
}

/// Resolve every candidate with at most `max_in_flight` queries
/// outstanding. Results come back in input order; a failed lookup becomes
/// an unresolved result carrying the error text.
pub fn probe_batch_with_clock(
    candidates: &[Domain],
    resolver: &dyn Resolver,
    max_in_flight: usize,
    clock: &(dyn Fn() -> f64 + Sync),
) -> Vec<ProbeResult> {
    let workers = max_in_flight.max(1).min(candidates.len());
    let next = AtomicUsize::new(0);
    let slots: Vec<Mutex<Option<ProbeResult>>> =
        candidates.iter().map(|_| Mutex::new(None)).collect();

    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                let Some(candidate) = candidates.get(i) else {
                    break;
                };
                let queried_at = clock();
                let result = match resolver.resolve(candidate) {
                    Ok(addrs) => ProbeResult {
                        candidate: candidate.clone(),
                        resolved: !addrs.is_empty(),
                        addresses: addrs.iter().map(IpAddr::to_string).collect(),
                        queried_at,
                        error: None,
                    },
                    Err(e) => ProbeResult {
                        candidate: candidate.clone(),
                        resolved: false,
                        addresses: Vec::new(),
                        queried_at,
                        error: Some(e),
                    },
                };
                *slots[i].lock().expect("slot lock") = Some(result);
            });
        }
    });

    slots
        .into_iter()
        .map(|s| {
            s.into_inner()
                .expect("slot lock")
                .expect("every slot filled")
        })
        .collect()
}

/// Share of results that resolved.
pub fn active_fraction(results: &[ProbeResult]) -> Result<f64, ProbeError> {
    if results.is_empty() {
        return Err(ProbeError::EmptyInput);
    }
    let resolved = results.iter().filter(|r| r.resolved).count();
    Ok(resolved as f64 / results.len() as f64)
}

/// Offline resolver backed by a `domain,addr1;addr2` table.
#[derive(Debug, Clone, Default)]
pub struct FixtureResolver {
    table: HashMap<Domain, Vec<IpAddr>>,
}

impl FixtureResolver {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, domain: Domain, addrs: Vec<IpAddr>) {
        self.table.insert(domain, addrs);
    }

    pub fn parse(text: &str) -> Result<Self, ProbeError> {
        let mut fixture = FixtureResolver::new();
        for (line, row) in content_lines(text) {
            let bad = |reason: String| ProbeError::BadFixture { line, reason };
            let (domain, addrs) = row.split_once(',').unwrap_or((row, ""));
            let domain = parse_domain(domain).map_err(|e| bad(e.to_string()))?;
            let addrs = addrs
                .split(';')
                .map(str::trim)
                .filter(|a| !a.is_empty())
                .map(|a| a.parse().map_err(|_| bad(format!("bad address {a:?}"))))
                .collect::<Result<Vec<IpAddr>, _>>()?;
            fixture.insert(domain, addrs);
        }
        Ok(fixture)
    }

    pub fn len(&self) -> usize {
        self.table.len()
    }

    pub fn is_empty(&self) -> bool {
        self.table.is_empty()
    }
}

impl Resolver for FixtureResolver {
    fn resolve(&self, name: &Domain) -> Result<Vec<IpAddr>, String> {
        Ok(self.table.get(name).cloned().unwrap_or_default())
    }
}

#[cfg(feature = "live")]
pub use live::LiveResolver;

#[cfg(feature = "live")]
mod live {
    use std::net::{IpAddr, SocketAddr};
    use std::time::Duration;

    use hickory_resolver::config::{NameServerConfigGroup, ResolverConfig, ResolverOpts};
    use hickory_resolver::error::ResolveErrorKind;
    use hickory_resolver::TokioAsyncResolver;

    use super::{ProbeError, Resolver};
    use crate::domain::Domain;

    /// A/AAAA lookups against the system resolvers or a given server.
    /// Three-second timeout, one retry.
    pub struct LiveResolver {
        runtime: tokio::runtime::Runtime,
        resolver: TokioAsyncResolver,
    }

    impl LiveResolver {
        pub fn new(server: Option<SocketAddr>) -> Result<Self, ProbeError> {
            let runtime = tokio::runtime::Builder::new_multi_thread()
                .enable_all()
                .build()
                .map_err(|e| ProbeError::Setup(e.to_string()))?;
            let mut opts = ResolverOpts::default();
            opts.timeout = Duration::from_secs(3);
            opts.attempts = 2;
            let resolver = match server {
                Some(addr) => {
                    let group =
                        NameServerConfigGroup::from_ips_clear(&[addr.ip()], addr.port(), true);
                    let config = ResolverConfig::from_parts(None, vec![], group);
                    let _guard = runtime.enter();
                    TokioAsyncResolver::tokio(config, opts)
                }
                None => {
                    let _guard = runtime.enter();
                    let (config, mut system_opts) =
                        hickory_resolver::system_conf::read_system_conf()
                            .map_err(|e| ProbeError::Setup(e.to_string()))?;
                    system_opts.timeout = opts.timeout;
                    system_opts.attempts = opts.attempts;
                    TokioAsyncResolver::tokio(config, system_opts)
                }
            };
            Ok(LiveResolver { runtime, resolver })
        }
    }

    impl Resolver for LiveResolver {
        fn resolve(&self, name: &Domain) -> Result<Vec<IpAddr>, String> {
            let fqdn = format!("{name}.");
            match self.runtime.block_on(self.resolver.lookup_ip(fqdn)) {
                Ok(lookup) => Ok(lookup.iter().collect()),
                Err(e) => match e.kind() {
                    ResolveErrorKind::NoRecordsFound { .. } => Ok(Vec::new()),
                    _ => Err(e.to_string()),
                },
            }
        }
    }
}
