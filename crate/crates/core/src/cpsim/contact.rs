use rand::Rng;
use rand_distr::Exp1;

use super::{ExtinctionTime, Trajectory};
use crate::error::{Error, Result};
use crate::graphgen::DilutedGraph;
use crate::rng::{sim_rng, SimRng};

const ABSENT: u32 = u32::MAX;
#[cfg(debug_assertions)]
const AUDIT_EVERY: u64 = 100_000;

/// Occupied set and rates of a running contact process.
///
/// Births are tracked as directed slots `x -> y` of the base graph with `x`
/// occupied and able to transmit across the edge, and `y` empty. The death
/// rate is the number of occupied vertices and the birth rate is `lambda`
/// times the number of such slots; both are kept exactly up to date.
pub struct ContactState<'a> {
    dg: &'a DilutedGraph,
    lambda: f64,
    occupied: Vec<bool>,
    occ: Vec<u32>,
    occ_pos: Vec<u32>,
    cand: Vec<u32>,
    cand_pos: Vec<u32>,
    time: f64,
    events: u64,
}

impl<'a> ContactState<'a> {
    pub fn new(dg: &'a DilutedGraph, lambda: f64, initial: &[bool]) -> Result<Self> {
        check_lambda(lambda)?;
        if initial.len() != dg.n() {
            return Err(Error::InvalidSize(format!(
                "initial state has {} entries for {} vertices",
                initial.len(),
                dg.n()
            )));
        }
        let g = dg.base();
        let mut s = ContactState {
            dg,
            lambda,
            occupied: vec![false; g.n()],
            occ: Vec::new(),
            occ_pos: vec![ABSENT; g.n()],
            cand: Vec::new(),
            cand_pos: vec![ABSENT; g.n_slots()],
            time: 0.0,
            events: 0,
        };
        for v in 0..g.n() as u32 {
            if initial[v as usize] {
                s.occupy(v);
            }
        }
        Ok(s)
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    pub fn occupied(&self) -> &[bool] {
        &self.occupied
    }

    pub fn n_occupied(&self) -> usize {
        self.occ.len()
    }

    pub fn total_death_rate(&self) -> f64 {
        self.occ.len() as f64
    }

    pub fn total_birth_rate(&self) -> f64 {
        self.lambda * self.cand.len() as f64
    }

    /// `(occupied count, birth slot count)` recomputed from the occupied set.
    pub fn recount(&self) -> (usize, usize) {
        let g = self.dg.base();
        let mut slots = 0;
        for x in 0..g.n() as u32 {
            if !self.occupied[x as usize] {
                continue;
            }
            for nb in g.neighbors(x) {
                if !self.occupied[nb.vertex as usize] && self.dg.transmits(x, nb.edge) {
                    slots += 1;
                }
            }
        }
        (self.occupied.iter().filter(|&&o| o).count(), slots)
    }

    /// Panics if the cached rates differ from recomputed ones.
    pub fn audit(&self) {
        let (occ, slots) = self.recount();
        assert_eq!(occ, self.occ.len(), "death rate drifted at t={}", self.time);
        assert_eq!(slots, self.cand.len(), "birth rate drifted at t={}", self.time);
    }

    fn push_cand(&mut self, s: usize) {
        if self.cand_pos[s] == ABSENT {
            self.cand_pos[s] = self.cand.len() as u32;
            self.cand.push(s as u32);
        }
    }

    fn remove_cand(&mut self, s: usize) {
        let pos = self.cand_pos[s];
        if pos != ABSENT {
            let last = self.cand.pop().unwrap();
            if last as usize != s {
                self.cand[pos as usize] = last;
                self.cand_pos[last as usize] = pos;
            }
            self.cand_pos[s] = ABSENT;
        }
    }

    fn occupy(&mut self, y: u32) {
        debug_assert!(!self.occupied[y as usize]);
        let g = self.dg.base();
        self.occupied[y as usize] = true;
        self.occ_pos[y as usize] = self.occ.len() as u32;
        self.occ.push(y);
        for s in g.slot_range(y) {
            let nb = g.slot(s);
            if self.occupied[nb.vertex as usize] {
                self.remove_cand(g.reverse_slot(s));
            } else if self.dg.transmits(y, nb.edge) {
                self.push_cand(s);
            }
        }
    }

    fn vacate(&mut self, x: u32) {
        let g = self.dg.base();
        self.occupied[x as usize] = false;
        let pos = self.occ_pos[x as usize] as usize;
        let last = self.occ.pop().unwrap();
        if last != x {
            self.occ[pos] = last;
            self.occ_pos[last as usize] = pos as u32;
        }
        self.occ_pos[x as usize] = ABSENT;
        for s in g.slot_range(x) {
            let nb = g.slot(s);
            self.remove_cand(s);
            if self.occupied[nb.vertex as usize] && self.dg.transmits(nb.vertex, nb.edge) {
                self.push_cand(g.reverse_slot(s));
            }
        }
    }

    /// Time until the next event, or `None` when the process is extinct.
    fn next_wait(&self, rng: &mut SimRng) -> Option<f64> {
        let total = self.total_death_rate() + self.total_birth_rate();
        if self.occ.is_empty() {
            return None;
        }
        let e: f64 = rng.sample(Exp1);
        Some(e / total)
    }

    fn apply_event(&mut self, rng: &mut SimRng) {
        let deaths = self.total_death_rate();
        let total = deaths + self.total_birth_rate();
        if rng.random::<f64>() * total < deaths {
            let v = self.occ[rng.random_range(0..self.occ.len())];
            self.vacate(v);
        } else {
            let s = self.cand[rng.random_range(0..self.cand.len())] as usize;
            let y = self.dg.base().slot(s).vertex;
            self.occupy(y);
        }
        self.events += 1;
        #[cfg(debug_assertions)]
        if self.events % AUDIT_EVERY == 0 {
            self.audit();
        }
    }
}

fn check_lambda(lambda: f64) -> Result<()> {
    if lambda > 0.0 && lambda.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("lambda must be positive, got {lambda}")))
    }
}

fn check_schedule(t_max: f64, schedule: &[f64]) -> Result<()> {
    if !(t_max >= 0.0) {
        return Err(Error::InvalidParameter(format!("t_max must be nonnegative, got {t_max}")));
    }
    if schedule.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::InvalidParameter("sample schedule must be strictly increasing".into()));
    }
    Ok(())
}

/// Contact process started from every vertex occupied.
pub fn run_contact(
    dg: &DilutedGraph,
    lambda: f64,
    t_max: f64,
    schedule: &[f64],
    seed: u64,
) -> Result<Trajectory> {
    run_contact_from(dg, lambda, &vec![true; dg.n()], t_max, schedule, seed)
}

/// Contact process from an arbitrary initial occupied set.
///
/// Samples are `(0, initial count)`, then `(t, count just before t)` for each
/// positive schedule time reached, then `(extinction time, 0)` or, when
/// censored, `(t_max, count)`.
pub fn run_contact_from(
    dg: &DilutedGraph,
    lambda: f64,
    initial: &[bool],
    t_max: f64,
    schedule: &[f64],
    seed: u64,
) -> Result<Trajectory> {
    check_schedule(t_max, schedule)?;
    let mut state = ContactState::new(dg, lambda, initial)?;
    let mut rng = sim_rng(seed);
    let mut samples = vec![(0.0, state.n_occupied() as u64)];
    let mut next = schedule.iter().copied().skip_while(|&s| s <= 0.0).peekable();
    let extinction = loop {
        let Some(wait) = state.next_wait(&mut rng) else {
            break ExtinctionTime { time: state.time, censored: false };
        };
        let t_next = state.time + wait;
        while let Some(&s) = next.peek() {
            if s > t_next || s > t_max {
                break;
            }
            samples.push((s, state.n_occupied() as u64));
            next.next();
        }
        if t_next > t_max {
            state.time = t_max;
            break ExtinctionTime { time: t_max, censored: true };
        }
        state.time = t_next;
        state.apply_event(&mut rng);
    };
    let last = samples.last().map_or(-1.0, |s| s.0);
    if extinction.time > last {
        samples.push((extinction.time, state.n_occupied() as u64));
    }
    Ok(Trajectory {
        samples,
        extinction,
        seed,
        rate: lambda,
        graph: dg.fingerprint(),
    })
}

/// Extinction time from all occupied, without recording samples.
pub fn extinction_time(dg: &DilutedGraph, lambda: f64, t_max: f64, seed: u64) -> Result<ExtinctionTime> {
    check_schedule(t_max, &[])?;
    let mut state = ContactState::new(dg, lambda, &vec![true; dg.n()])?;
    let mut rng = sim_rng(seed);
    loop {
        let Some(wait) = state.next_wait(&mut rng) else {
            return Ok(ExtinctionTime { time: state.time, censored: false });
        };
        if state.time + wait > t_max {
            return Ok(ExtinctionTime { time: t_max, censored: true });
        }
        state.time += wait;
        state.apply_event(&mut rng);
    }
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::graphgen::{dilute_bonds, dilute_sites, gen_erdos_renyi, gen_lattice2d, gen_path, Mask};

    fn undiluted_path(n: usize) -> DilutedGraph {
        DilutedGraph::undiluted(Arc::new(gen_path(n).unwrap()))
    }

    #[test]
    fn rejects_bad_parameters() {
        let d = undiluted_path(3);
        assert!(run_contact(&d, 0.0, 1.0, &[], 0).is_err());
        assert!(run_contact(&d, -1.0, 1.0, &[], 0).is_err());
        assert!(run_contact(&d, 1.0, 1.0, &[0.5, 0.2], 0).is_err());
        assert!(ContactState::new(&d, 1.0, &[true]).is_err());
    }

    #[test]
    fn rates_match_recount_through_a_run() {
        let g = Arc::new(gen_erdos_renyi(300, 3.0, 4).unwrap());
        for d in [
            dilute_bonds(g.clone(), 0.6, 1).unwrap(),
            dilute_sites(g.clone(), 0.6, 1).unwrap(),
        ] {
            let mut st = ContactState::new(&d, 1.7, &vec![true; 300]).unwrap();
            let mut rng = sim_rng(3);
            for _ in 0..5000 {
                if st.next_wait(&mut rng).is_none() {
                    break;
                }
                st.apply_event(&mut rng);
                st.audit();
            }
        }
    }

    #[test]
    fn site_mode_inert_vertices_never_give_birth() {
        // vertex 1 is inert: it starts occupied and can die but never spreads
        let g = Arc::new(gen_path(3).unwrap());
        let d = DilutedGraph::from_mask(g, Mask::Site(vec![false, false, true]), 0.5, 0).unwrap();
        let st = ContactState::new(&d, 2.0, &[false, true, false]).unwrap();
        assert_eq!(st.total_birth_rate(), 0.0);
        let st = ContactState::new(&d, 2.0, &[false, false, true]).unwrap();
        assert_eq!(st.total_birth_rate(), 2.0);
    }

    #[test]
    fn trajectory_shape() {
        let d = undiluted_path(10);
        let sched = [0.0, 0.5, 1.0, 2.0, 4.0];
        let tr = run_contact(&d, 1.0, 3.0, &sched, 7).unwrap();
        assert_eq!(tr.samples[0], (0.0, 10));
        assert!(tr.samples.windows(2).all(|w| w[0].0 < w[1].0));
        if tr.extinction.censored {
            assert_eq!(tr.extinction.time, 3.0);
            assert_eq!(tr.samples.last().unwrap().0, 3.0);
        } else {
            assert_eq!(*tr.samples.last().unwrap(), (tr.extinction.time, 0));
        }
        assert!(tr.samples.iter().all(|s| s.0 <= 3.0));
    }

    #[test]
    fn deterministic_given_seed() {
        let g = Arc::new(gen_lattice2d(12).unwrap());
        let d = dilute_bonds(g, 0.7, 2).unwrap();
        let sched: Vec<f64> = (0..30).map(|i| 0.1 * 1.3f64.powi(i)).collect();
        let a = run_contact(&d, 1.5, 50.0, &sched, 11).unwrap();
        let b = run_contact(&d, 1.5, 50.0, &sched, 11).unwrap();
        assert_eq!(a, b);
        let c = run_contact(&d, 1.5, 50.0, &sched, 12).unwrap();
        assert_ne!(a.samples, c.samples);
    }

    #[test]
    fn extinction_time_agrees_with_full_run() {
        let d = undiluted_path(8);
        for seed in 0..20 {
            let a = extinction_time(&d, 1.8, 100.0, seed).unwrap();
            let b = run_contact(&d, 1.8, 100.0, &[1.0, 10.0], seed).unwrap();
            assert_eq!(a, b.extinction);
        }
    }

    #[test]
    fn single_vertex_mean_is_one() {
        let d = undiluted_path(1);
        let n = 20_000;
        let total: f64 = (0..n)
            .map(|s| extinction_time(&d, 1.0, f64::INFINITY, s).unwrap().time)
            .sum();
        assert!((total / n as f64 - 1.0).abs() < 0.03);
    }
}
