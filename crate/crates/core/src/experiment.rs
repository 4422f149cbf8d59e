//! Segments and their features, computed once per dataset and shared by
//! every victim, configuration and model family.

use std::collections::BTreeSet;

use crate::features::{compute_all, SegmentFeatures};
use crate::ingestion::{AttackKind, Dataset};
use crate::segmentation::{segment, DroppedSegment, InteractionSegment};

#[derive(Debug, Clone)]
pub struct Experiment {
    /// Labels and timing only; signal matrices are released after feature
    /// extraction.
    pub segments: Vec<InteractionSegment>,
    pub features: Vec<SegmentFeatures>,
    pub dropped: Vec<DroppedSegment>,
}

impl Experiment {
    pub fn from_dataset(dataset: &Dataset) -> Self {
        let seg = segment(dataset);
        Self::from_segments(seg.segments, seg.dropped)
    }

    pub fn from_segments(mut segments: Vec<InteractionSegment>, dropped: Vec<DroppedSegment>) -> Self {
        let features = compute_all(&segments);
        segments.iter_mut().for_each(InteractionSegment::strip_signals);
        Experiment {
            segments,
            features,
            dropped,
        }
    }

    pub fn objects(&self) -> BTreeSet<String> {
        self.segments.iter().map(|s| s.object_id.clone()).collect()
    }

    /// Users with at least one non-attack segment.
    pub fn users(&self) -> BTreeSet<String> {
        self.segments
            .iter()
            .filter(|s| s.attack == AttackKind::None)
            .map(|s| s.user_id.clone())
            .collect()
    }
}
