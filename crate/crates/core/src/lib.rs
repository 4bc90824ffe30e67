pub mod backend;
pub mod benchbuild;
pub mod datamodel;
pub mod judge;
pub mod lift;
pub mod metrics;
pub mod report;
pub mod seeded;
pub mod wordcount;
