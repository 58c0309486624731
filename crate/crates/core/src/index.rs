//! Ready-to-query bundles of a timetable and its labels.

use serde::{Deserialize, Serialize};

use crate::graph::{build_ea_graph, build_mc_graph};
use crate::labeling::{
    build_labels, build_stop_labels, label_stats, reassign_hub_ids, trim_event_labels, LabelError,
    LabelMode, LabelOptions, LabelSet, LabelStats, StopLabelSet, VertexOrdering,
};
use crate::mtt::{shift_arrivals_for_mtt_mc, split_stops_for_mtt_ea};
use crate::query::{
    ea_query, mc_query, profile_event_labels, profile_stop_labels, EaAnswer, EaQuery, EaVariant,
    Engine, McAnswer, ProfileEntry, QueryError,
};
use crate::superlabel::{loc_ea_query, loc_profile_query, LocationAccess};
use crate::timetable::{StopId, Time, Timetable, TimetableError};

/// How minimum transfer times are handled.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MttStrategy {
    /// Ignore transfer times.
    #[default]
    None,
    /// Split stops (earliest-arrival labels).
    Split,
    /// Shift arrivals (multicriteria labels).
    Shift,
}

/// Earliest-arrival labels: event labels and stop labels over one timetable,
/// with time-ordered hub ids.
#[derive(Clone, Debug)]
pub struct EaIndex {
    pub timetable: Timetable,
    pub labels: LabelSet,
    pub stop_labels: StopLabelSet,
}

impl EaIndex {
    /// Builds labels for `tt` as is.
    pub fn build(tt: Timetable, ordering: VertexOrdering) -> Result<EaIndex, LabelError> {
        let g = build_ea_graph(&tt);
        let ls = build_labels(&g, LabelOptions::new(LabelMode::Reachability).ordering(ordering))?;
        let sls = build_stop_labels(&ls, &tt)?;
        let (stop_labels, labels, _) = reassign_hub_ids(&sls, &ls);
        Ok(EaIndex {
            timetable: tt,
            labels,
            stop_labels,
        })
    }

    /// Splits stops with transfer times first when `strategy` is `Split`.
    pub fn build_with_mtt(
        tt: &Timetable,
        ordering: VertexOrdering,
        strategy: MttStrategy,
    ) -> Result<EaIndex, LabelError> {
        match strategy {
            MttStrategy::Split => EaIndex::build(split_stops_for_mtt_ea(tt), ordering),
            _ => EaIndex::build(tt.clone(), ordering),
        }
    }

    pub fn from_parts(timetable: Timetable, labels: LabelSet, stop_labels: StopLabelSet) -> Self {
        EaIndex {
            timetable,
            labels,
            stop_labels,
        }
    }

    pub fn ea(&self, q: EaQuery, variant: EaVariant) -> Result<EaAnswer, QueryError> {
        ea_query(q, &self.timetable, &self.labels, &self.stop_labels, variant)
    }

    pub fn profile(&self, source: StopId, target: StopId, engine: Engine) -> Result<Vec<ProfileEntry>, QueryError> {
        match engine {
            Engine::EventLabels => profile_event_labels(source, target, &self.labels, &self.timetable),
            Engine::StopLabels => profile_stop_labels(source, target, &self.stop_labels),
        }
    }

    pub fn loc_ea(&self, src: &LocationAccess, dst: &LocationAccess, departure: Time) -> Result<EaAnswer, QueryError> {
        loc_ea_query(src, dst, departure, &self.stop_labels)
    }

    pub fn loc_profile(&self, src: &LocationAccess, dst: &LocationAccess) -> Result<Vec<ProfileEntry>, QueryError> {
        loc_profile_query(src, dst, &self.stop_labels)
    }

    /// Label sizes, including trimmed event labels.
    pub fn stats(&self) -> IndexStats {
        let trimmed = trim_event_labels(&self.labels, &self.timetable)
            .expect("earliest-arrival labels are reachability labels");
        IndexStats {
            labels: label_stats(&self.labels, Some(&self.stop_labels), &self.timetable),
            trimmed_entries: trimmed.total_entries(),
            stop_label_entries: self.stop_labels.total_entries(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IndexStats {
    pub labels: LabelStats,
    pub trimmed_entries: usize,
    pub stop_label_entries: usize,
}

/// Multicriteria distance labels over a timetable.
#[derive(Clone, Debug)]
pub struct McIndex {
    pub timetable: Timetable,
    pub labels: LabelSet,
}

impl McIndex {
    pub fn build(tt: Timetable, ordering: VertexOrdering) -> Result<McIndex, LabelError> {
        let g = build_mc_graph(&tt);
        let labels = build_labels(&g, LabelOptions::new(LabelMode::Distance).ordering(ordering))?;
        Ok(McIndex {
            timetable: tt,
            labels,
        })
    }

    /// Shifts arrivals by transfer times first when `strategy` is `Shift`.
    pub fn build_with_mtt(
        tt: &Timetable,
        ordering: VertexOrdering,
        strategy: MttStrategy,
    ) -> Result<McIndex, McBuildError> {
        let tt = match strategy {
            MttStrategy::Shift => shift_arrivals_for_mtt_mc(tt)?,
            _ => tt.clone(),
        };
        Ok(McIndex::build(tt, ordering)?)
    }

    pub fn query(&self, q: EaQuery) -> Result<McAnswer, QueryError> {
        mc_query(q, &self.labels, &self.timetable)
    }

    pub fn stats(&self) -> LabelStats {
        label_stats(&self.labels, None, &self.timetable)
    }
}

#[derive(Debug, thiserror::Error)]
pub enum McBuildError {
    #[error(transparent)]
    Timetable(#[from] TimetableError),
    #[error(transparent)]
    Labels(#[from] LabelError),
}
