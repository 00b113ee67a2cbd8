//! BSS patterns, the first-feasible heuristic and an exhaustive oracle.

use std::fmt;
use std::path::Path;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::evaluate::{evaluate_off_flags, EvalContext, PatternEvaluation, Snapshot};

/// Largest cluster the exhaustive oracle will enumerate.
pub const MAX_ORACLE_BSS: usize = 10;

const DEFAULT_PATTERNS: &str = include_str!("../data/patterns_default.txt");

/// Off-flags over the center BSs; `true` means switched off.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct BssPattern {
    off: Vec<bool>,
    label: String,
}

impl BssPattern {
    pub fn new(off: Vec<bool>, label: Option<String>) -> Result<Self> {
        if off.is_empty() {
            return Err(Error::Pattern("pattern has no BSs".into()));
        }
        if off.iter().all(|&o| o) {
            return Err(Error::Pattern("at least one BS must stay on".into()));
        }
        let a1 = off.iter().filter(|&&o| o).count();
        let label = label.unwrap_or_else(|| format!("Z{}/{}", a1, off.len()));
        Ok(BssPattern { off, label })
    }

    pub fn all_on(n: usize) -> Self {
        BssPattern::new(vec![false; n], None).expect("n > 0 and nothing off")
    }

    /// Bit `i` of `bits` switches off BS `i`.
    pub fn from_bits(bits: u64, n: usize) -> Result<Self> {
        BssPattern::new((0..n).map(|i| bits >> i & 1 == 1).collect(), None)
    }

    pub fn bits(&self) -> u64 {
        self.off
            .iter()
            .enumerate()
            .filter(|(_, &o)| o)
            .fold(0, |acc, (i, _)| acc | 1 << i)
    }

    pub fn off_flags(&self) -> &[bool] {
        &self.off
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// Number of BSs switched off.
    pub fn a1(&self) -> usize {
        self.off.iter().filter(|&&o| o).count()
    }

    /// Cluster size.
    pub fn a2(&self) -> usize {
        self.off.len()
    }

    pub fn is_all_on(&self) -> bool {
        self.a1() == 0
    }
}

impl fmt::Display for BssPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label)
    }
}

/// Percentage of cluster BSs switched off.
pub fn energy_saving(pattern: &BssPattern) -> f64 {
    pattern.a1() as f64 / pattern.a2() as f64 * 100.0
}

/// Candidate patterns ordered from lowest to highest energy consumption.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PatternList(Vec<BssPattern>);

impl PatternList {
    /// Sorts by decreasing `a1` (ties by bit value) and checks that the
    /// all-on pattern closes the list.
    pub fn new(mut patterns: Vec<BssPattern>) -> Result<Self> {
        if patterns.is_empty() {
            return Err(Error::EmptyPatternList);
        }
        let a2 = patterns[0].a2();
        if patterns.iter().any(|p| p.a2() != a2) {
            return Err(Error::Pattern("patterns cover different cluster sizes".into()));
        }
        patterns.sort_by_key(|p| (std::cmp::Reverse(p.a1()), p.bits()));
        patterns.dedup_by_key(|p| p.bits());
        if !patterns.last().is_some_and(|p| p.is_all_on()) {
            return Err(Error::Pattern("pattern list must include the all-on pattern".into()));
        }
        Ok(PatternList(patterns))
    }

    /// Every admissible pattern of an `n`-BS cluster.
    pub fn all(n: usize) -> Result<Self> {
        if n == 0 || n > MAX_ORACLE_BSS {
            return Err(Error::OracleBound(n));
        }
        let full = (1u64 << n) - 1;
        PatternList::new((0..full).map(|b| BssPattern::from_bits(b, n)).collect::<Result<_>>()?)
    }

    /// Parses lines of whitespace-separated 0/1 flags with an optional
    /// trailing label. `#` starts a comment.
    pub fn parse(text: &str) -> Result<Self> {
        let mut patterns = Vec::new();
        for (n, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let mut off = Vec::new();
            let mut label = None;
            for (i, tok) in line.split_whitespace().enumerate() {
                match tok {
                    "0" | "1" if label.is_none() => off.push(tok == "1"),
                    _ if label.is_none() && i > 0 && !tok.bytes().all(|c| c.is_ascii_digit()) => {
                        label = Some(tok.to_string())
                    }
                    _ => {
                        return Err(Error::Pattern(format!(
                            "line {}: unexpected token `{tok}`",
                            n + 1
                        )))
                    }
                }
            }
            patterns.push(
                BssPattern::new(off, label)
                    .map_err(|e| Error::Pattern(format!("line {}: {e}", n + 1)))?,
            );
        }
        PatternList::new(patterns)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        PatternList::parse(&text)
    }

    pub fn patterns(&self) -> &[BssPattern] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn cluster_size(&self) -> usize {
        self.0[0].a2()
    }
}

impl Default for PatternList {
    /// The shipped five-pattern list Z4/7, Z3/7, Z2/7, Z1/7, Z0/7.
    fn default() -> Self {
        PatternList::parse(DEFAULT_PATTERNS).expect("bundled pattern list is valid")
    }
}

pub fn evaluate_pattern(
    pattern: &BssPattern,
    snapshot: &Snapshot,
    ctx: &EvalContext<'_>,
) -> Result<PatternEvaluation> {
    evaluate_off_flags(snapshot, pattern.off_flags(), ctx)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HeuristicResult {
    pub selected: BssPattern,
    pub evaluation: PatternEvaluation,
    pub feasible: bool,
    pub patterns_evaluated: usize,
}

impl HeuristicResult {
    pub fn energy_saving_pct(&self) -> f64 {
        energy_saving(&self.selected)
    }
}

/// Exported summary of one evaluated pattern.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PatternRecord {
    pub pattern: String,
    pub energy_saving_pct: f64,
    pub min_rate_bps: f64,
    pub feasible: bool,
    pub per_user_rates: Vec<f64>,
}

impl PatternRecord {
    pub fn new(pattern: &BssPattern, evaluation: &PatternEvaluation) -> Self {
        PatternRecord {
            pattern: pattern.label().to_string(),
            energy_saving_pct: energy_saving(pattern),
            min_rate_bps: evaluation.min_rate,
            feasible: evaluation.feasible,
            per_user_rates: evaluation.rates.clone(),
        }
    }
}

/// Evaluates every pattern of `list` and writes the records as a JSON array.
pub fn write_records_json<W: std::io::Write>(
    list: &PatternList,
    snapshot: &Snapshot,
    ctx: &EvalContext<'_>,
    out: W,
) -> Result<()> {
    let records = list
        .patterns()
        .iter()
        .map(|p| Ok(PatternRecord::new(p, &evaluate_pattern(p, snapshot, ctx)?)))
        .collect::<Result<Vec<_>>>()?;
    serde_json::to_writer_pretty(out, &records)?;
    Ok(())
}

/// Walks the list from the least energy-consuming pattern and stops at the
/// first one meeting the rate threshold. When none does, the final (all-on)
/// pattern is returned flagged infeasible.
pub fn heuristic_select(list: &PatternList, snapshot: &Snapshot, ctx: &EvalContext<'_>) -> Result<HeuristicResult> {
    let mut last = None;
    for (j, pattern) in list.patterns().iter().enumerate() {
        let evaluation = evaluate_pattern(pattern, snapshot, ctx)?;
        if evaluation.feasible {
            return Ok(HeuristicResult {
                selected: pattern.clone(),
                evaluation,
                feasible: true,
                patterns_evaluated: j + 1,
            });
        }
        last = Some((pattern.clone(), evaluation));
    }
    let (selected, evaluation) = last.ok_or(Error::EmptyPatternList)?;
    Ok(HeuristicResult {
        selected,
        evaluation,
        feasible: false,
        patterns_evaluated: list.len(),
    })
}

/// Brute force over every admissible pattern: the feasible one with the
/// most BSs off, ties to the lowest bit value. Falls back to all-on flagged
/// infeasible.
pub fn exhaustive_oracle(snapshot: &Snapshot, ctx: &EvalContext<'_>) -> Result<HeuristicResult> {
    let n = snapshot.center_bss().len();
    if n > MAX_ORACLE_BSS {
        return Err(Error::OracleBound(n));
    }
    let full = (1u64 << n) - 1;
    let mut best: Option<(BssPattern, PatternEvaluation)> = None;
    for bits in 0..full {
        let pattern = BssPattern::from_bits(bits, n)?;
        let evaluation = evaluate_pattern(&pattern, snapshot, ctx)?;
        if !evaluation.feasible {
            continue;
        }
        let better = match &best {
            None => true,
            Some((b, _)) => pattern.a1() > b.a1(),
        };
        if better {
            best = Some((pattern, evaluation));
        }
    }
    match best {
        Some((selected, evaluation)) => Ok(HeuristicResult {
            selected,
            evaluation,
            feasible: true,
            patterns_evaluated: full as usize,
        }),
        None => {
            let selected = BssPattern::all_on(n);
            let evaluation = evaluate_pattern(&selected, snapshot, ctx)?;
            Ok(HeuristicResult {
                selected,
                evaluation,
                feasible: false,
                patterns_evaluated: full as usize,
            })
        }
    }
}
