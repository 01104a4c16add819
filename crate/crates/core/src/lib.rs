//! Semantic relatedness over a categorized, hyperlinked page corpus.
//!
//! * [`graph_store`] loads pages, category links and hyperlinks.
//! * [`taxonomy`] scores term pairs by the information content of their
//!   least common subsumer in the category graph.
//! * [`ahits`] ranks related pages for a seed by hub/authority iteration.
//! * [`eval`] compares scores and ranked lists against human judgments.

pub mod ahits;
mod bitset;
pub mod eval;
pub mod graph_store;
mod scc;
pub mod taxonomy;

pub use graph_store::{load_knowledge_base, KnowledgeBase, Page, PageId, PageKind, StoreError};
pub use taxonomy::{RelatednessScore, SkipReason};
