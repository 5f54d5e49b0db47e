//! Configurations, views, the update rules and the event trace.

mod audit;
mod config;
mod engine;
pub mod invariants;
mod trace;
mod update;

pub use audit::{audit, audit_all, AuditError, AuditReport, PayloadItem};
pub use config::{Config, Settings};
pub use engine::{infer_settings, replay, replay_with, Engine, ReplayError};
pub use trace::{read_jsonl, write_jsonl, Entry, TraceError, TraceEvent};
pub use update::{apply_update, ControlRecord, Outcome, Rejection, SystemState, Update};
