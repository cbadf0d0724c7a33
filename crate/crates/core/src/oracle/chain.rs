use super::model::{ModelError, Outcome, OutcomeModel};

/// Live half-inning state. Bit 0 of `mask` is first base, bit 2 third.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LiveState {
    pub mask: u8,
    pub outs: u8,
}

impl LiveState {
    pub const START: LiveState = LiveState { mask: 0, outs: 0 };

    pub fn index(self) -> usize {
        usize::from(self.outs) * 8 + usize::from(self.mask)
    }

    pub fn from_index(i: usize) -> Self {
        LiveState { mask: (i % 8) as u8, outs: (i / 8) as u8 }
    }

    pub fn all() -> impl Iterator<Item = LiveState> {
        (0..24).map(LiveState::from_index)
    }

    pub fn occupied(self, base: u8) -> bool {
        self.mask & (1 << (base - 1)) != 0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Dest {
    Base(u8),
    Home,
    Out,
}

/// Movement of the batter (`from == 0`) or a runner. Runners who hold
/// appear with `to == Dest::Base(from)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RunnerMove {
    pub from: u8,
    pub to: Dest,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Resolution {
    /// Lead runner first, batter last.
    pub moves: Vec<RunnerMove>,
    pub runs: u8,
    pub outs_added: u8,
    /// `None` once the third out is made.
    pub next: Option<LiveState>,
}

pub fn resolve(model: &OutcomeModel, state: LiveState, outcome: Outcome) -> Resolution {
    let dest_of = |d: u8| if d >= 4 { Dest::Home } else { Dest::Base(d) };
    let occupied: Vec<u8> = [3u8, 2, 1].into_iter().filter(|&b| state.occupied(b)).collect();
    let mut moves: Vec<RunnerMove> = Vec::with_capacity(4);
    let batter = match outcome {
        Outcome::Out | Outcome::Strikeout => {
            moves.extend(occupied.iter().map(|&b| RunnerMove { from: b, to: Dest::Base(b) }));
            Dest::Out
        }
        Outcome::DoublePlay if state.occupied(1) && state.outs < 2 => {
            for &b in &occupied {
                let to = if b == 1 { Dest::Out } else { Dest::Base(b) };
                moves.push(RunnerMove { from: b, to });
            }
            Dest::Out
        }
        Outcome::DoublePlay => {
            moves.extend(occupied.iter().map(|&b| RunnerMove { from: b, to: Dest::Base(b) }));
            Dest::Out
        }
        Outcome::Walk => {
            let forced = |b: u8| (1..=b).all(|x| state.occupied(x));
            for &b in &occupied {
                let to = if forced(b) { dest_of(b + 1) } else { Dest::Base(b) };
                moves.push(RunnerMove { from: b, to });
            }
            Dest::Base(1)
        }
        Outcome::Single | Outcome::Double => {
            let (policy, batter) =
                if outcome == Outcome::Single { (model.single_policy, 1) } else { (model.double_policy, 2) };
            moves.extend(occupied.iter().map(|&b| RunnerMove { from: b, to: dest_of(policy.destination(b)) }));
            Dest::Base(batter)
        }
        Outcome::Triple => {
            moves.extend(occupied.iter().map(|&b| RunnerMove { from: b, to: Dest::Home }));
            Dest::Base(3)
        }
        Outcome::HomeRun => {
            moves.extend(occupied.iter().map(|&b| RunnerMove { from: b, to: Dest::Home }));
            Dest::Home
        }
    };
    moves.push(RunnerMove { from: 0, to: batter });

    let mut mask = 0u8;
    let mut runs = 0u8;
    let mut outs_added = 0u8;
    for m in &moves {
        match m.to {
            Dest::Base(b) => mask |= 1 << (b - 1),
            Dest::Home => runs += 1,
            Dest::Out => outs_added += 1,
        }
    }
    let outs = state.outs + outs_added;
    let next = (outs < 3).then_some(LiveState { mask, outs });
    Resolution { moves, runs, outs_added, next }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Edge {
    pub probability: f64,
    pub outcome: Outcome,
    pub runs: u8,
    pub next: Option<LiveState>,
}

/// Transition structure over the 24 live states. An edge with `runs > 0`
/// enters the scored absorbing state; `next == None` with no run enters the
/// three-out absorbing state.
#[derive(Debug, Clone)]
pub struct HalfInningChain {
    rows: Vec<Vec<Edge>>,
}

impl HalfInningChain {
    pub fn new(model: &OutcomeModel) -> Result<Self, ModelError> {
        model.validate()?;
        let rows = LiveState::all()
            .map(|s| {
                model
                    .effective(s.occupied(1), s.outs)
                    .into_iter()
                    .filter(|(_, p)| *p > 0.0)
                    .map(|(outcome, probability)| {
                        let r = resolve(model, s, outcome);
                        Edge { probability, outcome, runs: r.runs, next: r.next }
                    })
                    .collect()
            })
            .collect();
        Ok(HalfInningChain { rows })
    }

    pub fn edges(&self, state: LiveState) -> &[Edge] {
        &self.rows[state.index()]
    }

    /// Probability of at least one run before the third out, from every
    /// live state. Edges that neither score nor record an out add a runner,
    /// so filling states by descending outs then descending runner count
    /// only ever reads finished entries.
    pub fn score_probabilities(&self) -> [f64; 24] {
        let mut value = [0.0f64; 24];
        let mut order: Vec<LiveState> = LiveState::all().collect();
        order.sort_by_key(|s| (std::cmp::Reverse(s.outs), std::cmp::Reverse(s.mask.count_ones())));
        for s in order {
            value[s.index()] = self
                .edges(s)
                .iter()
                .map(|e| {
                    let v = match (e.runs, e.next) {
                        (r, _) if r > 0 => 1.0,
                        (_, None) => 0.0,
                        (_, Some(n)) => {
                            debug_assert!(n.outs > s.outs || n.mask.count_ones() > s.mask.count_ones());
                            value[n.index()]
                        }
                    };
                    e.probability * v
                })
                .sum();
        }
        value
    }

    /// Distribution of the first state visited inside `class` starting from
    /// `start`, as (state, probability) pairs. The mass missing from 1 is the
    /// chance the class is never visited.
    pub fn first_entry(&self, start: LiveState, class: impl Fn(LiveState) -> bool) -> Vec<(LiveState, f64)> {
        if class(start) {
            return vec![(start, 1.0)];
        }
        let transient: Vec<LiveState> = LiveState::all().filter(|s| !class(*s)).collect();
        let pos = |s: LiveState| transient.iter().position(|t| *t == s);
        let n = transient.len();
        // Expected visits v solve v (I - Q) = e_start, i.e. (I - Q)^T v = e_start.
        let mut a = vec![vec![0.0f64; n]; n];
        for (i, row) in a.iter_mut().enumerate() {
            row[i] = 1.0;
        }
        for (j, s) in transient.iter().enumerate() {
            for e in self.edges(*s) {
                if let Some(k) = e.next.and_then(pos) {
                    a[k][j] -= e.probability;
                }
            }
        }
        let mut b = vec![0.0; n];
        b[pos(start).expect("start is transient")] = 1.0;
        let visits = solve(a, b);
        let mut entry = [0.0f64; 24];
        for (j, s) in transient.iter().enumerate() {
            for e in self.edges(*s) {
                if let Some(x) = e.next.filter(|x| class(*x)) {
                    entry[x.index()] += visits[j] * e.probability;
                }
            }
        }
        LiveState::all().filter(|s| class(*s) && entry[s.index()] > 0.0).map(|s| (s, entry[s.index()])).collect()
    }
}

/// Gaussian elimination with partial pivoting on a small dense system.
fn solve(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Vec<f64> {
    let n = b.len();
    for col in 0..n {
        let pivot = (col..n).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs())).unwrap();
        a.swap(col, pivot);
        b.swap(col, pivot);
        for row in col + 1..n {
            let factor = a[row][col] / a[col][col];
            if factor != 0.0 {
                let (upper, lower) = a.split_at_mut(row);
                for (x, &y) in lower[0][col..].iter_mut().zip(&upper[col][col..]) {
                    *x -= factor * y;
                }
                b[row] -= factor * b[col];
            }
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let tail: f64 = (row + 1..n).map(|k| a[row][k] * x[k]).sum();
        x[row] = (b[row] - tail) / a[row][row];
    }
    x
}

pub fn exact_score_probability(model: &OutcomeModel, mask: u8, outs: u8) -> Result<f64, ModelError> {
    if mask > 7 || outs > 2 {
        return Err(ModelError::InvalidModel(format!("no live state with mask {mask} and {outs} outs")));
    }
    Ok(HalfInningChain::new(model)?.score_probabilities()[LiveState { mask, outs }.index()])
}

/// Scoring probabilities from the single-runner representative of each
/// class behind the `i`-out threshold: third only, second only, and first
/// only with one more out.
pub fn exact_tsf(model: &OutcomeModel, i: u8) -> Result<(f64, f64, f64), ModelError> {
    if i > 1 {
        return Err(ModelError::InvalidModel(format!("threshold defined for 0 or 1 outs, not {i}")));
    }
    let p = HalfInningChain::new(model)?.score_probabilities();
    let at = |mask, outs| p[LiveState { mask, outs }.index()];
    Ok((at(0b100, i), at(0b010, i), at(0b001, i + 1)))
}

/// Expected T, S and F rates under once-per-half-inning counting: each
/// class's scoring probability averaged over where a half-inning starting
/// empty with no outs first enters it. `None` for a class never entered.
pub fn exact_class_rates(model: &OutcomeModel, i: u8) -> Result<[Option<f64>; 3], ModelError> {
    if i > 1 {
        return Err(ModelError::InvalidModel(format!("threshold defined for 0 or 1 outs, not {i}")));
    }
    let chain = HalfInningChain::new(model)?;
    let score = chain.score_probabilities();
    let classes: [Box<dyn Fn(LiveState) -> bool>; 3] = [
        Box::new(move |s: LiveState| s.outs == i && s.mask & 0b100 != 0),
        Box::new(move |s: LiveState| s.outs == i && s.mask & 0b110 == 0b010),
        Box::new(move |s: LiveState| s.outs == i + 1 && s.mask == 0b001),
    ];
    Ok(classes.map(|class| {
        let entry = chain.first_entry(LiveState::START, class);
        let mass: f64 = entry.iter().map(|(_, p)| p).sum();
        (mass > 0.0).then(|| entry.iter().map(|(s, p)| p * score[s.index()]).sum::<f64>() / mass)
    }))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rows_sum_to_one() {
        let chain = HalfInningChain::new(&OutcomeModel::default()).unwrap();
        for s in LiveState::all() {
            let total: f64 = chain.edges(s).iter().map(|e| e.probability).sum();
            assert!((total - 1.0).abs() < 1e-12, "{s:?} sums to {total}");
        }
    }

    #[test]
    fn closed_form_two_outcome() {
        let m = OutcomeModel::two_outcome(2.0 / 3.0);
        let p = exact_score_probability(&m, 0b100, 1).unwrap();
        assert!((p - 5.0 / 9.0).abs() < 1e-12);
        let (t, s, f) = exact_tsf(&m, 1).unwrap();
        assert!((t - 5.0 / 9.0).abs() < 1e-12 && (s - 5.0 / 9.0).abs() < 1e-12);
        assert!((f - 1.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn degenerate_models() {
        let hr = OutcomeModel::two_outcome(0.0);
        let out = OutcomeModel::two_outcome(1.0);
        for s in LiveState::all() {
            assert_eq!(exact_score_probability(&hr, s.mask, s.outs).unwrap(), 1.0);
            assert_eq!(exact_score_probability(&out, s.mask, s.outs).unwrap(), 0.0);
        }
        assert_eq!(exact_tsf(&hr, 1).unwrap(), (1.0, 1.0, 1.0));
    }

    #[test]
    fn realistic_ordering() {
        for i in 0..2 {
            let (t, s, f) = exact_tsf(&OutcomeModel::default(), i).unwrap();
            assert!(t > s && s > f, "i={i}: {t} {s} {f}");
        }
    }

    #[test]
    fn resolutions() {
        let m = OutcomeModel::default();
        let loaded = LiveState { mask: 7, outs: 0 };
        let w = resolve(&m, loaded, Outcome::Walk);
        assert_eq!((w.runs, w.next), (1, Some(LiveState { mask: 7, outs: 0 })));
        let w = resolve(&m, LiveState { mask: 0b101, outs: 0 }, Outcome::Walk);
        assert_eq!((w.runs, w.next), (0, Some(LiveState { mask: 7, outs: 0 })));
        let gdp = resolve(&m, LiveState { mask: 0b101, outs: 1 }, Outcome::DoublePlay);
        assert_eq!((gdp.runs, gdp.next), (0, None));
        let gdp = resolve(&m, LiveState { mask: 0b011, outs: 0 }, Outcome::DoublePlay);
        assert_eq!(gdp.next, Some(LiveState { mask: 0b010, outs: 2 }));
        let s = resolve(&m, LiveState { mask: 0b011, outs: 2 }, Outcome::Single);
        assert_eq!((s.runs, s.next), (0, Some(LiveState { mask: 0b111, outs: 2 })));
        let hr = resolve(&m, loaded, Outcome::HomeRun);
        assert_eq!((hr.runs, hr.next), (4, Some(LiveState::START)));
        let k = resolve(&m, LiveState { mask: 1, outs: 2 }, Outcome::Strikeout);
        assert_eq!((k.outs_added, k.next), (1, None));
    }

    #[test]
    fn class_rates_match_canonical_when_homogeneous() {
        let m = OutcomeModel::station_to_station();
        for i in 0..2 {
            let (t, s, f) = exact_tsf(&m, i).unwrap();
            let [ct, cs, cf] = exact_class_rates(&m, i).unwrap();
            assert!((ct.unwrap() - t).abs() < 1e-12);
            assert!((cs.unwrap() - s).abs() < 1e-12);
            assert!((cf.unwrap() - f).abs() < 1e-12);
        }
    }

    #[test]
    fn first_entry_mass_is_at_most_one() {
        let chain = HalfInningChain::new(&OutcomeModel::default()).unwrap();
        let entry = chain.first_entry(LiveState::START, |s| s.outs == 1 && s.mask & 0b100 != 0);
        let mass: f64 = entry.iter().map(|(_, p)| p).sum();
        assert!(mass > 0.0 && mass < 1.0);
        let all = chain.first_entry(LiveState::START, |s| s.outs == 1);
        let mass: f64 = all.iter().map(|(_, p)| p).sum();
        // Every half-inning passes through one out unless a double play skips it.
        assert!(mass < 1.0 && mass > 0.9);
    }
}
