use std::f64::consts::PI;
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::analytic::success_probability;
use crate::error::{Error, Result};
use crate::phasefit::{fit_phase, validate_ordering, PhaseFit};

/// What participants were asked to do while viewing each item.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Strategy {
    Watch,
    Reappraise,
    Suppress,
}

impl Strategy {
    pub const ALL: [Strategy; 3] = [Strategy::Watch, Strategy::Reappraise, Strategy::Suppress];

    pub fn label(&self) -> &'static str {
        match self {
            Strategy::Watch => "watch",
            Strategy::Reappraise => "reappraise",
            Strategy::Suppress => "suppress",
        }
    }

    pub fn from_label(label: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|s| s.label() == label)
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// Emotional intensity of the presented material.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EmotionLevel {
    Low,
    High,
}

impl EmotionLevel {
    pub const ALL: [EmotionLevel; 2] = [EmotionLevel::Low, EmotionLevel::High];

    pub fn label(&self) -> &'static str {
        match self {
            EmotionLevel::Low => "low",
            EmotionLevel::High => "high",
        }
    }

    pub fn from_label(label: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|e| e.label() == label)
    }
}

impl fmt::Display for EmotionLevel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// One cell of the experiment: a strategy/emotion pair with its observed
/// recognition rate, group size, and an optional published phase to
/// compare fits against.
#[derive(Debug, Clone, PartialEq)]
pub struct Condition {
    pub strategy: Strategy,
    pub emotion: EmotionLevel,
    pub observed_p: f64,
    pub participants: u32,
    pub reference_phase: Option<f64>,
}

/// Recognition rates for the verbal half of the study; kept for display
/// only and never fitted here.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VerbalRecall {
    pub watch: f64,
    pub reappraise: f64,
    pub suppress: f64,
}

/// The full 3x2 design: every strategy/emotion cell exactly once, plus
/// the model dimensions used for fitting.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentTable {
    conditions: Vec<Condition>,
    n: usize,
    j: u32,
    verbal: Option<VerbalRecall>,
}

/// Canonical cell order: low watch/reappraise/suppress, then high.
fn canonical_index(strategy: Strategy, emotion: EmotionLevel) -> usize {
    let e = match emotion {
        EmotionLevel::Low => 0,
        EmotionLevel::High => 1,
    };
    let s = match strategy {
        Strategy::Watch => 0,
        Strategy::Reappraise => 1,
        Strategy::Suppress => 2,
    };
    e * 3 + s
}

impl ExperimentTable {
    /// Validates and canonically orders the six cells.
    pub fn new(n: usize, j: u32, conditions: Vec<Condition>) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidDimension(n));
        }
        if j == 0 {
            return Err(Error::ZeroIterations);
        }
        if conditions.len() != 6 {
            return Err(Error::Fixture {
                line: 0,
                reason: format!("expected 6 cells, got {}", conditions.len()),
            });
        }
        let mut slots: Vec<Option<Condition>> = vec![None; 6];
        for c in conditions {
            if !(0.0..=1.0).contains(&c.observed_p) {
                return Err(Error::Fixture {
                    line: 0,
                    reason: format!("observed probability {} outside [0, 1]", c.observed_p),
                });
            }
            if c.participants == 0 {
                return Err(Error::Fixture {
                    line: 0,
                    reason: "participant count must be positive".into(),
                });
            }
            if let Some(phase) = c.reference_phase {
                if !phase.is_finite() || phase <= 0.0 || phase >= 2.0 * PI {
                    return Err(Error::Fixture {
                        line: 0,
                        reason: format!("reference phase {phase} outside (0, 2*pi)"),
                    });
                }
            }
            let idx = canonical_index(c.strategy, c.emotion);
            if slots[idx].is_some() {
                return Err(Error::Fixture {
                    line: 0,
                    reason: format!("duplicate cell {},{}", c.strategy, c.emotion),
                });
            }
            slots[idx] = Some(c);
        }
        let conditions = slots
            .into_iter()
            .collect::<Option<Vec<_>>>()
            .ok_or_else(|| Error::Fixture {
                line: 0,
                reason: "missing cell: all six strategy/emotion pairs are required".into(),
            })?;
        Ok(Self {
            conditions,
            n,
            j,
            verbal: None,
        })
    }

    /// Attaches the verbal-material rates.
    pub fn with_verbal(mut self, verbal: VerbalRecall) -> Result<Self> {
        for rate in [verbal.watch, verbal.reappraise, verbal.suppress] {
            if !(0.0..=1.0).contains(&rate) {
                return Err(Error::Fixture {
                    line: 0,
                    reason: format!("verbal rate {rate} outside [0, 1]"),
                });
            }
        }
        self.verbal = Some(verbal);
        Ok(self)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn j(&self) -> u32 {
        self.j
    }

    /// Cells in canonical order (low then high, watch/reappraise/suppress).
    pub fn conditions(&self) -> &[Condition] {
        &self.conditions
    }

    pub fn condition(&self, strategy: Strategy, emotion: EmotionLevel) -> &Condition {
        &self.conditions[canonical_index(strategy, emotion)]
    }

    pub fn verbal(&self) -> Option<&VerbalRecall> {
        self.verbal.as_ref()
    }

    /// Parses the plain-text fixture format:
    ///
    /// ```text
    /// #n=80 j=3
    /// watch,low,0.43,40,2.8
    /// suppress,high,0.40,20
    /// ```
    ///
    /// The first non-blank line must be the `#n=... j=...` header; later
    /// `#` lines are comments; the trailing phase column is optional.
    pub fn parse(text: &str) -> Result<Self> {
        let mut header: Option<(usize, u32)> = None;
        let mut conditions = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.trim();
            if line.is_empty() {
                continue;
            }
            if header.is_none() {
                header = Some(parse_header(line, line_no)?);
                continue;
            }
            if line.starts_with('#') {
                continue;
            }
            conditions.push(parse_row(line, line_no)?);
        }
        let (n, j) = header.ok_or(Error::Fixture {
            line: 1,
            reason: "missing #n=... j=... header".into(),
        })?;
        Self::new(n, j, conditions)
    }

    /// Serializes back to the fixture format parsed by [`Self::parse`].
    pub fn to_fixture_string(&self) -> String {
        let mut out = format!("#n={} j={}\n", self.n, self.j);
        for c in &self.conditions {
            out.push_str(&format!(
                "{},{},{},{}",
                c.strategy, c.emotion, c.observed_p, c.participants
            ));
            if let Some(phase) = c.reference_phase {
                out.push_str(&format!(",{phase}"));
            }
            out.push('\n');
        }
        out
    }
}

fn parse_header(line: &str, line_no: usize) -> Result<(usize, u32)> {
    let body = line.strip_prefix('#').ok_or_else(|| Error::Fixture {
        line: line_no,
        reason: "first line must be the #n=... j=... header".into(),
    })?;
    let mut n = None;
    let mut j = None;
    for token in body.split_whitespace() {
        if let Some(v) = token.strip_prefix("n=") {
            n = Some(v.parse::<usize>().map_err(|_| Error::Fixture {
                line: line_no,
                reason: format!("bad n value {v:?}"),
            })?);
        } else if let Some(v) = token.strip_prefix("j=") {
            j = Some(v.parse::<u32>().map_err(|_| Error::Fixture {
                line: line_no,
                reason: format!("bad j value {v:?}"),
            })?);
        } else {
            return Err(Error::Fixture {
                line: line_no,
                reason: format!("unexpected header token {token:?}"),
            });
        }
    }
    match (n, j) {
        (Some(n), Some(j)) => Ok((n, j)),
        _ => Err(Error::Fixture {
            line: line_no,
            reason: "header needs both n= and j=".into(),
        }),
    }
}

fn parse_row(line: &str, line_no: usize) -> Result<Condition> {
    let fields: Vec<&str> = line.split(',').map(str::trim).collect();
    if fields.len() < 4 || fields.len() > 5 {
        return Err(Error::Fixture {
            line: line_no,
            reason: format!(
                "expected 4 or 5 comma-separated fields, got {}",
                fields.len()
            ),
        });
    }
    let strategy = Strategy::from_label(fields[0]).ok_or_else(|| Error::Fixture {
        line: line_no,
        reason: format!(
            "unknown strategy {:?} (want watch/reappraise/suppress)",
            fields[0]
        ),
    })?;
    let emotion = EmotionLevel::from_label(fields[1]).ok_or_else(|| Error::Fixture {
        line: line_no,
        reason: format!("unknown emotion level {:?} (want low/high)", fields[1]),
    })?;
    let observed_p = fields[2].parse::<f64>().map_err(|_| Error::Fixture {
        line: line_no,
        reason: format!("bad probability {:?}", fields[2]),
    })?;
    let participants = fields[3].parse::<u32>().map_err(|_| Error::Fixture {
        line: line_no,
        reason: format!("bad participant count {:?}", fields[3]),
    })?;
    let reference_phase = match fields.get(4) {
        Some(v) => Some(v.parse::<f64>().map_err(|_| Error::Fixture {
            line: line_no,
            reason: format!("bad phase {:?}", v),
        })?),
        None => None,
    };
    Ok(Condition {
        strategy,
        emotion,
        observed_p,
        participants,
        reference_phase,
    })
}

/// The built-in non-verbal recognition data set: six strategy/emotion
/// cells with group sizes and published phases, an 80-item search space,
/// three iterations, and the verbal rates alongside.
pub fn builtin_experiment() -> ExperimentTable {
    let cell = |strategy, emotion, observed_p, participants, phase| Condition {
        strategy,
        emotion,
        observed_p,
        participants,
        reference_phase: Some(phase),
    };
    ExperimentTable::new(
        80,
        3,
        vec![
            cell(Strategy::Watch, EmotionLevel::Low, 0.43, 40, 2.8),
            cell(Strategy::Reappraise, EmotionLevel::Low, 0.40, 22, 2.5),
            cell(Strategy::Suppress, EmotionLevel::Low, 0.35, 20, 2.0),
            cell(Strategy::Watch, EmotionLevel::High, 0.37, 40, 4.3),
            cell(Strategy::Reappraise, EmotionLevel::High, 0.48, 22, 3.6),
            cell(Strategy::Suppress, EmotionLevel::High, 0.40, 20, 2.5),
        ],
    )
    .expect("built-in table is valid")
    .with_verbal(VerbalRecall {
        watch: 0.18,
        reappraise: 0.16,
        suppress: 0.13,
    })
    .expect("built-in verbal rates are valid")
}

/// One fitted cell: the observed rate with all candidate phases.
#[derive(Debug, Clone)]
pub struct FitRow {
    pub strategy: Strategy,
    pub emotion: EmotionLevel,
    pub observed_p: f64,
    pub fit: PhaseFit,
    pub reference_phase: Option<f64>,
}

/// One branch choice per cell that passed the ordering constraints.
#[derive(Debug, Clone, PartialEq)]
pub struct Assignment {
    /// Phases in canonical cell order.
    pub phases: [f64; 6],
    /// Whether the high-emotion watch phase exceeds pi.
    pub high_watch_above_pi: bool,
    /// Sum of |fitted - reference| when every cell has a reference phase.
    pub reference_gap: Option<f64>,
}

/// Everything `reproduce_table` finds: per-cell fits plus all consistent
/// branch assignments, best first.
#[derive(Debug, Clone)]
pub struct TableReport {
    /// Fitted cells in canonical order.
    pub rows: Vec<FitRow>,
    /// Ordering-consistent assignments, preferred one first.
    pub assignments: Vec<Assignment>,
    /// Number of branch combinations enumerated.
    pub combinations: usize,
}

impl TableReport {
    /// The preferred assignment, if any passed the ordering constraints.
    pub fn selected(&self) -> Option<&Assignment> {
        self.assignments.first()
    }
}

/// Fits a phase to every cell, enumerates all branch combinations, and
/// keeps those whose two emotion chains decrease strictly from watch to
/// reappraise to suppress. Preference order: high-emotion watch phase
/// above pi first, then smallest total distance to the reference phases,
/// then lexicographic.
pub fn reproduce_table(table: &ExperimentTable) -> Result<TableReport> {
    let mut rows = Vec::with_capacity(6);
    for c in table.conditions() {
        let fit = fit_phase(c.observed_p, table.n(), table.j()).map_err(|e| match e {
            Error::InfeasibleTarget {
                target, ceiling, ..
            } => Error::InfeasibleCell {
                cell: format!("{},{}", c.strategy, c.emotion),
                target,
                ceiling,
            },
            other => other,
        })?;
        rows.push(FitRow {
            strategy: c.strategy,
            emotion: c.emotion,
            observed_p: c.observed_p,
            fit,
            reference_phase: c.reference_phase,
        });
    }

    let references: Option<Vec<f64>> = rows.iter().map(|r| r.reference_phase).collect();
    let counts: Vec<usize> = rows.iter().map(|r| r.fit.branches.len()).collect();
    let combinations = counts.iter().product();

    let mut assignments = Vec::new();
    let mut choice = [0usize; 6];
    'outer: loop {
        let mut phases = [0.0; 6];
        for (i, row) in rows.iter().enumerate() {
            phases[i] = row.fit.branches[choice[i]];
        }
        let low = [phases[0], phases[1], phases[2]];
        let high = [phases[3], phases[4], phases[5]];
        if validate_ordering(&low, &high).ok {
            let reference_gap = references.as_ref().map(|refs| {
                phases
                    .iter()
                    .zip(refs)
                    .map(|(p, r)| (p - r).abs())
                    .sum::<f64>()
            });
            assignments.push(Assignment {
                phases,
                high_watch_above_pi: phases[3] > PI,
                reference_gap,
            });
        }
        // mixed-radix increment over the per-cell branch counts
        for i in (0..6).rev() {
            choice[i] += 1;
            if choice[i] < counts[i] {
                continue 'outer;
            }
            choice[i] = 0;
        }
        break;
    }

    assignments.sort_by(|a, b| {
        b.high_watch_above_pi
            .cmp(&a.high_watch_above_pi)
            .then_with(|| {
                let ga = a.reference_gap.unwrap_or(f64::INFINITY);
                let gb = b.reference_gap.unwrap_or(f64::INFINITY);
                ga.partial_cmp(&gb).expect("gaps are finite or infinite")
            })
            .then_with(|| {
                a.phases
                    .iter()
                    .partial_cmp(b.phases.iter())
                    .expect("finite")
            })
    });

    Ok(TableReport {
        rows,
        assignments,
        combinations,
    })
}

/// Where the phases used for a synthetic run came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PhaseSource {
    /// The preferred ordering-consistent fitted assignment.
    Fitted,
    /// The table's reference phases (used when no assignment passes).
    Reference,
}

impl PhaseSource {
    pub fn label(&self) -> &'static str {
        match self {
            PhaseSource::Fitted => "fitted",
            PhaseSource::Reference => "reference",
        }
    }
}

/// Synthetic per-cell outcome of Bernoulli recognition trials.
#[derive(Debug, Clone, PartialEq)]
pub struct CellOutcome {
    pub strategy: Strategy,
    pub emotion: EmotionLevel,
    pub phase: f64,
    /// Model probability the trials were drawn at.
    pub model_p: f64,
    pub trials: u64,
    pub successes: u64,
}

impl CellOutcome {
    pub fn frequency(&self) -> f64 {
        self.successes as f64 / self.trials as f64
    }
}

/// A reproducible synthetic rerun of the whole table.
#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticExperiment {
    /// Cells in canonical order.
    pub cells: Vec<CellOutcome>,
    pub phase_source: PhaseSource,
    pub seed: u64,
}

/// Draws Bernoulli trials for every cell at its model probability.
/// Each cell gets its own generator derived from `seed`, so results are
/// reproducible and independent of cell order. Without an explicit
/// `trials_per_cell`, each cell runs 9 trials per participant (one per
/// studied item in the original design).
pub fn simulate_participants(
    table: &ExperimentTable,
    trials_per_cell: Option<u64>,
    seed: u64,
) -> Result<SyntheticExperiment> {
    let report = reproduce_table(table)?;
    let (phases, phase_source) = match report.selected() {
        Some(a) => (a.phases, PhaseSource::Fitted),
        None => {
            let refs: Option<Vec<f64>> = table
                .conditions()
                .iter()
                .map(|c| c.reference_phase)
                .collect();
            let refs = refs.ok_or(Error::NoConsistentAssignment)?;
            let mut phases = [0.0; 6];
            phases.copy_from_slice(&refs);
            (phases, PhaseSource::Reference)
        }
    };

    let mut cells = Vec::with_capacity(6);
    for (i, c) in table.conditions().iter().enumerate() {
        let phase = phases[i];
        let model_p = success_probability(table.n(), table.j(), phase)?;
        let trials = trials_per_cell.unwrap_or(u64::from(c.participants) * 9);
        let mut rng = ChaCha8Rng::seed_from_u64(mix_seed(seed, i as u64));
        let successes = bernoulli_count(&mut rng, model_p, trials);
        cells.push(CellOutcome {
            strategy: c.strategy,
            emotion: c.emotion,
            phase,
            model_p,
            trials,
            successes,
        });
    }
    Ok(SyntheticExperiment {
        cells,
        phase_source,
        seed,
    })
}

/// SplitMix64-style mixing so every cell gets a well-separated stream.
fn mix_seed(seed: u64, cell: u64) -> u64 {
    let mut z = seed ^ cell.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn bernoulli_count<R: Rng>(rng: &mut R, p: f64, trials: u64) -> u64 {
    (0..trials).filter(|_| rng.gen::<f64>() < p).count() as u64
}
