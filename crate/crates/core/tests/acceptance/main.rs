//! Integration tests, built as one binary so every suite runs even when a criterion fails.

mod catalog_reports;
mod criteria;
mod invariants;
mod oracle;
