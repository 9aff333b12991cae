//! Local search for metric facility location problems, with exact oracles and
//! machine-checked approximation certificates.
//!
//! The crate covers four objectives over a finite metric: k-median, the
//! ℓp-norm objective (k-means at p = 2, k-center near p = log n), uncapacitated
//! facility location (UFL) and k-UFL. For each it provides
//!
//! * a best-improvement local search over swap / open / close moves
//!   ([`search`]),
//! * an exhaustive optimum for small instances ([`oracle`]),
//! * constructions of the exchange arguments used to bound local optima and
//!   numeric checks of every inequality they imply ([`certify`]).
//!
//! ```
//! use facloc::{instances, oracle, search, certify};
//!
//! let torus = instances::gen_torus(instances::TorusSpec::new(4, 1.0).unwrap()).unwrap();
//! let cfg = search::SearchConfig::default();
//! let (local, trace) = search::run_local_search(&torus.instance, &cfg, Some(&torus.odd)).unwrap();
//! assert_eq!(trace.termination, search::Termination::LocalOpt);
//! let opt = oracle::brute_lp(&torus.instance).unwrap();
//! let certs = certify::certify_all(&torus.instance, &local, &opt, 1).unwrap();
//! assert!(certs.iter().all(|c| c.verdict));
//! ```

pub mod certify;
pub mod error;
pub mod instances;
pub mod metric;
pub mod objective;
pub mod oracle;
pub mod search;
pub mod tolerance;

pub use error::{Error, Result};
pub use metric::{Instance, InstanceBuilder, MetricSpace, ProblemKind, ValidationReport, Violation};
pub use objective::{assign, PhiP, Solution, SolutionReport};
pub use search::{Move, MoveKind, SearchConfig, SearchTrace, Termination};
