//! Synthetic labeled cohorts for the four behavioral archetypes, plus
//! brute-force oracles used by the acceptance tests.
//!
//! The archetype parameters are qualitative portraits turned into uniform
//! ranges; they are configuration (see `configs/synth_default.toml`), not
//! constants. Generation is reproducible across platforms: a ChaCha8 stream
//! per contributor, seeded by a splitmix64 hash of the cohort seed and the
//! contributor's global index, so parallel and sequential generation emit
//! identical cohorts.

mod oracle;

pub use oracle::{adjusted_rand_index, exhaustive_kmedoids, ExhaustiveResult};

use chrono::{DateTime, TimeZone, Utc};
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dump::{ContributorHistory, ContributorRef};
use crate::interpret::Archetype;
use crate::{Error, Result};

/// Redraw attempts per contributor before concluding the archetype
/// parameters cannot satisfy the pipeline filter.
const MAX_REDRAWS: usize = 10_000;

/// An inclusive integer range, drawn from uniformly.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Range {
    pub min: u32,
    pub max: u32,
}

impl Range {
    pub const fn new(min: u32, max: u32) -> Self {
        Range { min, max }
    }

    fn draw(&self, rng: &mut ChaCha8Rng) -> u32 {
        rng.random_range(self.min..=self.max)
    }

    fn validate(&self, what: &str) -> Result<()> {
        if self.min > self.max {
            return Err(Error::Invalid(format!(
                "{what}: empty range {}..={}",
                self.min, self.max
            )));
        }
        Ok(())
    }
}

/// Generative portrait of one archetype: how many active months, how many
/// edits in each, and how far apart successive active months sit
/// (`gap_months` of 1 means consecutive calendar months).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArchetypeSpec {
    pub archetype: Archetype,
    pub active_months: Range,
    pub edits_per_month: Range,
    pub gap_months: Range,
}

/// One block of a cohort: `count` contributors drawn from `spec`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CohortBlock {
    pub count: usize,
    #[serde(flatten)]
    pub spec: ArchetypeSpec,
}

/// Full description of a synthetic cohort.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthSpec {
    pub seed: u64,
    /// Histories are redrawn until their total edit count exceeds this,
    /// mirroring the pipeline's `total > min_edits` filter.
    pub min_total: u64,
    /// First active month, as a calendar month index (year × 12 + month − 1),
    /// drawn per contributor.
    pub start_month: Range,
    pub blocks: Vec<CohortBlock>,
}

impl Default for SynthSpec {
    /// The default four-archetype mix (40 on-a-mission / 80 casual /
    /// 50 regular / 15 top) with start months spanning 2004–2015.
    fn default() -> Self {
        SynthSpec {
            seed: 1,
            min_total: 100,
            start_month: Range::new(2004 * 12, 2015 * 12 + 11),
            blocks: vec![
                CohortBlock {
                    count: 40,
                    spec: ArchetypeSpec {
                        archetype: Archetype::OnAMission,
                        active_months: Range::new(2, 4),
                        edits_per_month: Range::new(40, 120),
                        gap_months: Range::new(6, 18),
                    },
                },
                CohortBlock {
                    count: 80,
                    spec: ArchetypeSpec {
                        archetype: Archetype::Casual,
                        active_months: Range::new(5, 15),
                        edits_per_month: Range::new(8, 20),
                        gap_months: Range::new(2, 6),
                    },
                },
                CohortBlock {
                    count: 50,
                    spec: ArchetypeSpec {
                        archetype: Archetype::Regular,
                        active_months: Range::new(18, 36),
                        edits_per_month: Range::new(5, 25),
                        gap_months: Range::new(1, 1),
                    },
                },
                CohortBlock {
                    count: 15,
                    spec: ArchetypeSpec {
                        archetype: Archetype::Top,
                        active_months: Range::new(24, 48),
                        edits_per_month: Range::new(60, 300),
                        gap_months: Range::new(1, 2),
                    },
                },
            ],
        }
    }
}

/// One generated contributor with its planted label.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledMember {
    pub history: ContributorHistory,
    pub label: Archetype,
}

/// A reproducible synthetic cohort.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledCohort {
    pub seed: u64,
    pub members: Vec<LabeledMember>,
}

/// splitmix64 finalizer at stream position `index`: the standard way to
/// derive independent per-item seeds from one master seed.
fn derive_seed(seed: u64, index: u64) -> u64 {
    let mut z = seed
        .wrapping_add(index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn month_start(index: i32, day: u32) -> DateTime<Utc> {
    let year = index.div_euclid(12);
    let month = index.rem_euclid(12) as u32 + 1;
    Utc.with_ymd_and_hms(year, month, day, 12, 0, 0)
        .single()
        .expect("day ≤ 28 is valid in every month")
}

/// Draw one history from `spec`, redrawing until it passes the pipeline
/// filter (registered non-bot is structural; total > `min_total` and ≥ 2
/// active months are enforced here).
fn generate_history(
    spec: &ArchetypeSpec,
    start_month: Range,
    min_total: u64,
    id: u64,
    rng: &mut ChaCha8Rng,
) -> Result<ContributorHistory> {
    for _ in 0..MAX_REDRAWS {
        let t = spec.active_months.draw(rng);
        let start = start_month.draw(rng) as i32;
        let mut monthly_counts = std::collections::BTreeMap::new();
        let mut month = start;
        for i in 0..t {
            if i > 0 {
                month += spec.gap_months.draw(rng) as i32;
            }
            monthly_counts.insert(month, spec.edits_per_month.draw(rng) as u64);
        }
        let total: u64 = monthly_counts.values().sum();
        if total <= min_total || monthly_counts.len() < 2 {
            continue;
        }
        let first_month = *monthly_counts.keys().next().unwrap();
        let last_month = *monthly_counts.keys().next_back().unwrap();
        let first_edit = month_start(first_month, rng.random_range(1..=28));
        let last_edit = month_start(last_month, rng.random_range(1..=28));
        let distinct_articles = rng.random_range(1..=total);
        return Ok(ContributorHistory {
            contributor: ContributorRef::registered(
                Some(id),
                Some(format!("synth:{}:{id:04}", spec.archetype)),
                false,
            ),
            monthly_counts,
            first_edit,
            last_edit,
            distinct_articles,
        });
    }
    Err(Error::Invalid(format!(
        "archetype '{}' cannot satisfy total > {min_total} with ≥ 2 active \
         months after {MAX_REDRAWS} draws; widen its ranges",
        spec.archetype
    )))
}

/// Generate the labeled cohort described by `spec`. Deterministic in
/// `spec.seed` and invariant under the number of worker threads.
pub fn generate_cohort(spec: &SynthSpec) -> Result<LabeledCohort> {
    if spec.blocks.is_empty() {
        return Err(Error::Invalid("cohort has no blocks".into()));
    }
    spec.start_month.validate("start_month")?;
    for block in &spec.blocks {
        if block.count == 0 {
            return Err(Error::Invalid(format!(
                "block '{}' has count 0; every block needs at least one member",
                block.spec.archetype
            )));
        }
        block.spec.active_months.validate("active_months")?;
        block.spec.edits_per_month.validate("edits_per_month")?;
        block.spec.gap_months.validate("gap_months")?;
        if block.spec.gap_months.min == 0 {
            return Err(Error::Invalid(
                "gap_months must be ≥ 1 (months are distinct)".into(),
            ));
        }
    }

    let jobs: Vec<(usize, &ArchetypeSpec)> = spec
        .blocks
        .iter()
        .flat_map(|b| std::iter::repeat_n(&b.spec, b.count))
        .enumerate()
        .collect();

    let members: Result<Vec<LabeledMember>> = jobs
        .into_par_iter()
        .map(|(index, arch)| {
            let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(spec.seed, index as u64));
            let history = generate_history(
                arch,
                spec.start_month,
                spec.min_total,
                index as u64 + 1,
                &mut rng,
            )?;
            Ok(LabeledMember {
                history,
                label: arch.archetype,
            })
        })
        .collect();

    Ok(LabeledCohort {
        seed: spec.seed,
        members: members?,
    })
}
