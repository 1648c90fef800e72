//! Primitive closed geodesics as cyclically reduced Lyndon words.
//!
//! Words are generated depth first in lexicographic order, keeping only
//! prenecklace prefixes (the Fredricksen–Kessler–Maiorana recursion), so each
//! primitive conjugacy class is reached once through its least rotation.
//! Prefixes are cut with a lower bound on the length of every cyclic word
//! they can start: for a prefix product `P` ending in letter `x`, the cyclic
//! word's multiplier is `P'(y)` times contractions, with `y` in some disk
//! other than the one of `x⁻¹`, so `l ≥ -log sup |P'|` over those disks.

use std::sync::atomic::{AtomicU64, Ordering};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{inverse_letter, word_string, Letter, SchottkyGroup};
use crate::error::{Error, Result};
use crate::mobius::MoebiusElement;

pub const DEFAULT_NODE_BUDGET: u64 = 4_000_000_000;

/// Which conjugacy classes count as distinct geodesics.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Orientation {
    /// `γ` and `γ⁻¹` are distinct classes.
    Oriented,
    /// One class per geometric closed geodesic.
    #[default]
    Unoriented,
}

impl Orientation {
    /// Number of oriented classes behind each unoriented one.
    pub fn weight(self) -> f64 {
        match self {
            Orientation::Oriented => 2.0,
            Orientation::Unoriented => 1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnumerationConfig {
    pub l_max: f64,
    pub orientation: Orientation,
    /// Optional cap on the word length, on top of the length cutoff.
    pub max_word_length: Option<usize>,
    /// Abort once this many search nodes have been visited.
    pub node_budget: u64,
}

impl EnumerationConfig {
    pub fn new(l_max: f64, orientation: Orientation) -> Self {
        EnumerationConfig {
            l_max,
            orientation,
            max_word_length: None,
            node_budget: DEFAULT_NODE_BUDGET,
        }
    }

    pub fn with_max_word_length(mut self, k: usize) -> Self {
        self.max_word_length = Some(k);
        self
    }

    pub fn with_node_budget(mut self, budget: u64) -> Self {
        self.node_budget = budget;
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GeodesicClass {
    pub word: Vec<Letter>,
    pub length: f64,
    pub primitive: bool,
}

impl GeodesicClass {
    pub fn word_string(&self) -> String {
        word_string(&self.word)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LengthSpectrumEntry {
    /// Representative word of the first class in the cluster.
    pub word: String,
    pub length: f64,
    pub multiplicity: usize,
}

/// Sorted lengths of the unoriented primitive classes up to `l_max`.
#[derive(Debug, Clone, PartialEq)]
pub struct GeodesicLengths {
    pub lengths: Vec<f64>,
    pub l_max: f64,
    pub orientation: Orientation,
    /// Lower bounds on the length added by each letter transition, `[from][to]`.
    pub transition_costs: Vec<Vec<f64>>,
    pub nodes_visited: u64,
}

impl GeodesicLengths {
    /// Multiplicity of each stored length under the chosen convention.
    pub fn weight(&self) -> f64 {
        self.orientation.weight()
    }
}

impl SchottkyGroup {
    /// `c[x][y] = -log sup_{z ∈ D(y)} |g_x'(z)|` for `y ≠ x⁻¹`; infinite otherwise.
    pub fn transition_costs(&self) -> Vec<Vec<f64>> {
        let n = self.letter_count();
        (0..n)
            .map(|x| {
                let g = self.element(x as Letter);
                (0..n)
                    .map(|y| {
                        if y as Letter == inverse_letter(x as Letter) {
                            f64::INFINITY
                        } else {
                            disk_cost(&g, &self.disk(y as Letter))
                        }
                    })
                    .collect()
            })
            .collect()
    }

    /// Smallest per-letter displacement over the disk system.
    pub fn min_letter_cost(&self) -> f64 {
        self.transition_costs()
            .iter()
            .flatten()
            .copied()
            .fold(f64::INFINITY, f64::min)
    }

    /// Every primitive class of length `≤ l_max`, sorted by length then word.
    pub fn primitive_classes(&self, cfg: &EnumerationConfig) -> Result<Vec<GeodesicClass>> {
        let (mut found, _) = self.map_classes(cfg, &|word, length| GeodesicClass {
            word: word.to_vec(),
            length,
            primitive: true,
        })?;
        found.sort_by(|a, b| a.length.total_cmp(&b.length).then_with(|| a.word.cmp(&b.word)));
        Ok(found)
    }

    /// Lengths only, enumerated over unoriented classes; the orientation
    /// of `cfg` is carried as a multiplicity weight.
    pub fn geodesic_lengths(&self, cfg: &EnumerationConfig) -> Result<GeodesicLengths> {
        let unoriented = EnumerationConfig {
            orientation: Orientation::Unoriented,
            ..*cfg
        };
        let (mut lengths, nodes) = self.map_classes(&unoriented, &|_, length| length)?;
        lengths.sort_by(f64::total_cmp);
        Ok(GeodesicLengths {
            lengths,
            l_max: cfg.l_max,
            orientation: cfg.orientation,
            transition_costs: self.transition_costs(),
            nodes_visited: nodes,
        })
    }

    /// Classes aggregated by length, clustering lengths closer than `1e-9`.
    pub fn length_spectrum(&self, cfg: &EnumerationConfig) -> Result<Vec<LengthSpectrumEntry>> {
        let classes = self.primitive_classes(cfg)?;
        let mut out: Vec<LengthSpectrumEntry> = Vec::new();
        let mut anchor = f64::NEG_INFINITY;
        for class in classes {
            match out.last_mut() {
                Some(last) if class.length - anchor <= 1e-9 => last.multiplicity += 1,
                _ => {
                    anchor = class.length;
                    out.push(LengthSpectrumEntry {
                        word: class.word_string(),
                        length: class.length,
                        multiplicity: 1,
                    });
                }
            }
        }
        Ok(out)
    }

    /// Runs the pruned search and maps every class through `map`, in a
    /// deterministic order independent of the thread count.
    pub fn map_classes<T: Send>(
        &self,
        cfg: &EnumerationConfig,
        map: &(dyn Fn(&[Letter], f64) -> T + Sync),
    ) -> Result<(Vec<T>, u64)> {
        if !(cfg.l_max > 0.0) {
            return Err(Error::InvalidInput(format!(
                "l_max must be positive, got {}",
                cfg.l_max
            )));
        }
        let min_cost = self.min_letter_cost();
        if !(min_cost > 0.0) {
            return Err(Error::InvalidInput(
                "disk system does not contract: some letter has displacement bound <= 0".into(),
            ));
        }
        let by_length = (cfg.l_max / min_cost).floor();
        let k_max = match cfg.max_word_length {
            Some(k) => k.min(by_length.min(4096.0) as usize),
            None if by_length <= 4096.0 => by_length as usize,
            None => {
                return Err(Error::InvalidInput(format!(
                    "word-length cutoff {by_length} too large for l_max {}",
                    cfg.l_max
                )))
            }
        };
        let searcher = Searcher {
            group: self,
            elements: (0..self.letter_count() as Letter).map(|x| self.element(x)).collect(),
            l_max: cfg.l_max,
            orientation: cfg.orientation,
            k_max,
            budget: cfg.node_budget,
            nodes: AtomicU64::new(0),
        };

        // Shallow levels run sequentially and hand their frontier to the pool.
        let split_depth = 4.min(k_max);
        let mut frontier = Vec::new();
        let mut out = Vec::new();
        let mut local = 0u64;
        {
            let mut state = State::root();
            searcher.descend(
                &mut state,
                split_depth,
                &mut local,
                &mut |w, l| out.push(map(w, l)),
                &mut |s| frontier.push(s.clone()),
            )?;
        }
        searcher.flush(&mut local)?;

        let chunks: Vec<Result<Vec<T>>> = frontier
            .into_par_iter()
            .map(|mut state| {
                let mut found = Vec::new();
                let mut local = 0u64;
                searcher.descend(
                    &mut state,
                    usize::MAX,
                    &mut local,
                    &mut |w, l| found.push(map(w, l)),
                    &mut |_| {},
                )?;
                searcher.flush(&mut local)?;
                Ok(found)
            })
            .collect();
        for chunk in chunks {
            out.extend(chunk?);
        }
        Ok((out, searcher.nodes.load(Ordering::Relaxed)))
    }
}

/// `-log sup_{z ∈ disk} |g'(z)| = 2 log(|c| · dist(-d/c, disk))`.
pub(crate) fn disk_cost(g: &MoebiusElement, disk: &crate::mobius::Disk) -> f64 {
    let c = g.c();
    if c == 0.0 {
        return f64::NEG_INFINITY;
    }
    let clearance = (disk.center + g.d() / c).abs() - disk.radius;
    if clearance <= 0.0 {
        return f64::NEG_INFINITY;
    }
    2.0 * (c.abs() * clearance).ln()
}

#[derive(Clone)]
struct State {
    word: Vec<Letter>,
    /// Period of the current prenecklace.
    period: usize,
    product: MoebiusElement,
}

impl State {
    fn root() -> Self {
        State {
            word: Vec::with_capacity(64),
            period: 1,
            product: MoebiusElement::IDENTITY,
        }
    }
}

struct Searcher<'a> {
    group: &'a SchottkyGroup,
    elements: Vec<MoebiusElement>,
    l_max: f64,
    orientation: Orientation,
    k_max: usize,
    budget: u64,
    nodes: AtomicU64,
}

const FLUSH_EVERY: u64 = 1 << 14;

impl Searcher<'_> {
    fn flush(&self, local: &mut u64) -> Result<()> {
        let total = self.nodes.fetch_add(*local, Ordering::Relaxed) + *local;
        *local = 0;
        if total > self.budget {
            return Err(Error::BudgetExceeded { nodes: total });
        }
        Ok(())
    }

    /// Lower bound on the length of any cyclic word starting with the current prefix.
    fn prefix_bound(&self, product: &MoebiusElement, last: Letter) -> f64 {
        let forbidden = inverse_letter(last);
        (0..self.group.letter_count() as Letter)
            .filter(|&y| y != forbidden)
            .map(|y| disk_cost(product, &self.group.disk(y)))
            .fold(f64::INFINITY, f64::min)
    }

    /// Expands children of `state`. At `stop_depth` the state is handed to `park`
    /// instead of being expanded further.
    fn descend(
        &self,
        state: &mut State,
        stop_depth: usize,
        local: &mut u64,
        emit: &mut dyn FnMut(&[Letter], f64),
        park: &mut dyn FnMut(&State),
    ) -> Result<()> {
        let t = state.word.len();
        if t >= self.k_max {
            return Ok(());
        }
        if t == stop_depth {
            park(state);
            return Ok(());
        }
        let letters = self.group.letter_count() as Letter;
        let floor = if t == 0 { 0 } else { state.word[t - state.period] };
        for x in floor..letters {
            if t > 0 && x == inverse_letter(state.word[t - 1]) {
                continue;
            }
            *local += 1;
            if *local >= FLUSH_EVERY {
                self.flush(local)?;
            }
            let product = state.product.compose(&self.elements[x as usize]);
            if self.prefix_bound(&product, x) > self.l_max {
                continue;
            }
            let period = if t > 0 && x == floor { state.period } else { t + 1 };
            let saved = (state.period, state.product);
            state.word.push(x);
            state.period = period;
            state.product = product;

            let n = t + 1;
            if period == n && state.word[n - 1] != inverse_letter(state.word[0]) {
                self.consider(&state.word, &product, emit);
            }
            self.descend(state, stop_depth, local, emit, park)?;

            state.word.pop();
            state.period = saved.0;
            state.product = saved.1;
        }
        Ok(())
    }

    fn consider(&self, word: &[Letter], product: &MoebiusElement, emit: &mut dyn FnMut(&[Letter], f64)) {
        let Ok(length) = product.translation_length() else {
            return;
        };
        if length > self.l_max {
            return;
        }
        if self.orientation == Orientation::Unoriented && !precedes_inverse(word) {
            return;
        }
        emit(word, length);
    }
}

/// Whether a Lyndon word is smaller than the least rotation of its inverse.
fn precedes_inverse(word: &[Letter]) -> bool {
    let inverse: Vec<Letter> = word.iter().rev().map(|&x| inverse_letter(x)).collect();
    let rotated = least_rotation(&inverse);
    word < rotated.as_slice()
}

/// Lexicographically least rotation (quadratic scan; words are short).
pub(crate) fn least_rotation(word: &[Letter]) -> Vec<Letter> {
    let n = word.len();
    let mut best = 0;
    for start in 1..n {
        let better = (0..n)
            .map(|i| (word[(start + i) % n], word[(best + i) % n]))
            .find(|(a, b)| a != b)
            .is_some_and(|(a, b)| a < b);
        if better {
            best = start;
        }
    }
    (0..n).map(|i| word[(best + i) % n]).collect()
}
