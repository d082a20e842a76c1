//! Training-data plumbing: PGN ingestion into samples, the binary sample
//! format and the learning-rate schedule for external trainers.

mod ingest;
mod samples;
mod schedule;

pub use ingest::{
    game_samples, ingest_files, ingest_games, ingest_text, screen, IngestFilter, IngestStats, SkipReason,
};
pub use samples::{
    read_samples, read_samples_from, write_samples, SampleError, SampleWriter, TrainingSample, HEADER_LEN, MAGIC,
    RECORD_LEN,
};
pub use schedule::{
    one_cycle_schedule, peak_iteration, schedule_text, SchedulePoint, DEFAULT_WARMUP, LR_MAX, LR_MIN, MOMENTUM_MAX,
    MOMENTUM_MIN,
};
