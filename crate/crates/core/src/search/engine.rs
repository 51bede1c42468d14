//! Fixed-length feasibility search over colorings of `[1, n]`.
//!
//! Every progression keeps a per-color member count; once `k - 1` members
//! share a color the last member loses that color from its domain, and a
//! point left with a single admissible color is colored immediately.
//!
//! Branching picks the uncolored point with the fewest admissible colors,
//! breaking ties toward the middle of `[1, n]` and then toward the lower
//! index, and tries colors in ascending order. Colors that have not been
//! used yet are interchangeable, so only the smallest of them is offered.
//! Everything is deterministic: the same instance always yields the same
//! coloring.

use std::sync::atomic::{AtomicBool, AtomicU64, AtomicUsize, Ordering};
use std::sync::Mutex;
use std::thread;
use std::time::Instant;

/// Maximum number of colors the engine supports (domains are `u32` masks).
pub const MAX_COLORS: usize = 32;

pub(crate) struct Instance {
    n: usize,
    k: usize,
    r: usize,
    /// Flattened progression members, `k` entries per progression, 0-based.
    members: Vec<u32>,
    /// Progression ids containing each point.
    incidence: Vec<Vec<u32>>,
}

impl Instance {
    pub fn new(r: usize, k: usize, n: usize) -> Self {
        assert!((2..=MAX_COLORS).contains(&r));
        assert!(k >= 2);
        let mut members = Vec::new();
        let mut incidence = vec![Vec::new(); n];
        let mut id = 0u32;
        if n >= k {
            for d in 1..=(n - 1) / (k - 1) {
                for a in 0..n - (k - 1) * d {
                    for i in 0..k {
                        let p = a + i * d;
                        members.push(p as u32);
                        incidence[p].push(id);
                    }
                    id += 1;
                }
            }
        }
        Instance {
            n,
            k,
            r,
            members,
            incidence,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum Verdict {
    /// Colors `1..=r` for points `1..=n`.
    Feasible(Vec<u8>),
    Infeasible,
    Aborted,
}

/// Shared budget counters; several solvers may draw from one pool.
pub(crate) struct Limits {
    pub nodes: AtomicU64,
    pub max_nodes: Option<u64>,
    pub deadline: Option<Instant>,
    pub stop: AtomicBool,
}

impl Limits {
    pub fn new(max_nodes: Option<u64>, deadline: Option<Instant>) -> Self {
        Limits {
            nodes: AtomicU64::new(0),
            max_nodes,
            deadline,
            stop: AtomicBool::new(false),
        }
    }

    pub fn nodes(&self) -> u64 {
        self.nodes.load(Ordering::Relaxed)
    }

    fn charge(&self, nodes: u64) -> bool {
        let total = self.nodes.fetch_add(nodes, Ordering::Relaxed) + nodes;
        if self.stop.load(Ordering::Relaxed) {
            return false;
        }
        let over_nodes = self.max_nodes.is_some_and(|m| total > m);
        let over_time = self.deadline.is_some_and(|d| Instant::now() >= d);
        if over_nodes || over_time {
            self.stop.store(true, Ordering::Relaxed);
            return false;
        }
        true
    }
}

struct Frame {
    point: u32,
    /// Colors not yet tried at this point.
    pending: u32,
    trail_len: usize,
    domain_trail_len: usize,
}

pub(crate) struct Solver<'a> {
    inst: &'a Instance,
    color: Vec<u8>,
    domain: Vec<u32>,
    counts: Vec<u8>,
    used: Vec<u32>,
    trail: Vec<u32>,
    domain_trail: Vec<(u32, u32)>,
    queue: Vec<u32>,
}

const CHARGE_EVERY: u64 = 1 << 14;

impl<'a> Solver<'a> {
    pub fn new(inst: &'a Instance) -> Self {
        let full = if inst.r == 32 {
            u32::MAX
        } else {
            (1u32 << inst.r) - 1
        };
        Solver {
            inst,
            color: vec![0; inst.n],
            domain: vec![full; inst.n],
            counts: vec![0; (inst.members.len() / inst.k.max(1)) * inst.r],
            used: vec![0; inst.r + 1],
            trail: Vec::with_capacity(inst.n),
            domain_trail: Vec::new(),
            queue: Vec::new(),
        }
    }

    /// Colors `point` (0-based) with `c` (1-based) and propagates.
    /// Returns false on conflict; the caller undoes to its saved trail.
    fn assign(&mut self, point: u32, c: u8) -> bool {
        self.queue.clear();
        if !self.place(point, c) {
            return false;
        }
        while let Some(q) = self.queue.pop() {
            if self.color[q as usize] != 0 {
                continue;
            }
            let dom = self.domain[q as usize];
            if dom == 0 {
                return false;
            }
            let forced = dom.trailing_zeros() as u8 + 1;
            if !self.place(q, forced) {
                return false;
            }
        }
        true
    }

    fn place(&mut self, point: u32, c: u8) -> bool {
        let inst = self.inst;
        let p = point as usize;
        debug_assert_eq!(self.color[p], 0);
        self.color[p] = c;
        self.used[c as usize] += 1;
        self.trail.push(point);
        let k = inst.k;
        let r = inst.r;
        let bit = 1u32 << (c - 1);
        let mut ok = true;
        for &ap in &inst.incidence[p] {
            let slot = ap as usize * r + (c as usize - 1);
            self.counts[slot] += 1;
            if !ok || self.counts[slot] as usize != k - 1 {
                continue;
            }
            let base = ap as usize * k;
            for &m in &inst.members[base..base + k] {
                let m = m as usize;
                if self.color[m] == 0 {
                    let dom = self.domain[m];
                    if dom & bit != 0 {
                        self.domain_trail.push((m as u32, dom));
                        let nd = dom & !bit;
                        self.domain[m] = nd;
                        if nd == 0 {
                            ok = false;
                        } else if nd & (nd - 1) == 0 {
                            self.queue.push(m as u32);
                        }
                    }
                    break;
                }
            }
        }
        ok
    }

    fn undo_to(&mut self, trail_len: usize, domain_trail_len: usize) {
        let inst = self.inst;
        let r = inst.r;
        while self.trail.len() > trail_len {
            let p = self.trail.pop().unwrap() as usize;
            let c = self.color[p];
            for &ap in &inst.incidence[p] {
                self.counts[ap as usize * r + (c as usize - 1)] -= 1;
            }
            self.used[c as usize] -= 1;
            self.color[p] = 0;
        }
        while self.domain_trail.len() > domain_trail_len {
            let (p, d) = self.domain_trail.pop().unwrap();
            self.domain[p as usize] = d;
        }
    }

    /// Colors admissible at a branch: the point's domain, restricted so
    /// that at most one never-used color is offered (unused colors are
    /// interchangeable).
    fn branch_colors(&self, point: usize) -> u32 {
        let mut allowed = 0u32;
        let mut offered_fresh = false;
        for c in 1..=self.inst.r {
            let bit = 1u32 << (c - 1);
            if self.domain[point] & bit == 0 {
                continue;
            }
            if self.used[c] > 0 {
                allowed |= bit;
            } else if !offered_fresh {
                allowed |= bit;
                offered_fresh = true;
            }
        }
        allowed
    }

    fn next_free(&self) -> Option<usize> {
        let n = self.inst.n;
        let mut best: Option<(u32, usize, usize)> = None;
        for p in 0..n {
            if self.color[p] != 0 {
                continue;
            }
            let key = (self.domain[p].count_ones(), (2 * p).abs_diff(n - 1), p);
            if best.is_none_or(|b| key < b) {
                best = Some(key);
            }
        }
        best.map(|b| b.2)
    }

    /// Depth-first search from the current state. Returns the verdict and
    /// the number of branch nodes visited. Setting `cancel` makes the
    /// search stop at its next budget check.
    pub fn run(&mut self, limits: &Limits, cancel: Option<&AtomicBool>) -> (Verdict, u64) {
        let mut nodes = 0u64;
        let mut uncharged = 0u64;
        let mut stack: Vec<Frame> = Vec::new();
        let base_trail = self.trail.len();
        let base_domain = self.domain_trail.len();

        match self.next_free() {
            None => return (Verdict::Feasible(self.color.clone()), 0),
            Some(p) => {
                let pending = self.branch_colors(p);
                stack.push(Frame {
                    point: p as u32,
                    pending,
                    trail_len: self.trail.len(),
                    domain_trail_len: self.domain_trail.len(),
                });
            }
        }

        while let Some(frame) = stack.last_mut() {
            if frame.pending == 0 {
                let (t, d) = (frame.trail_len, frame.domain_trail_len);
                stack.pop();
                self.undo_to(t, d);
                continue;
            }
            let c = frame.pending.trailing_zeros() as u8 + 1;
            frame.pending &= frame.pending - 1;
            let (point, t, d) = (frame.point, frame.trail_len, frame.domain_trail_len);
            self.undo_to(t, d);

            nodes += 1;
            uncharged += 1;
            if uncharged >= CHARGE_EVERY {
                let cancelled = cancel.is_some_and(|c| c.load(Ordering::Relaxed));
                if cancelled || !limits.charge(uncharged) {
                    self.undo_to(base_trail, base_domain);
                    return (Verdict::Aborted, nodes);
                }
                uncharged = 0;
            }

            if !self.assign(point, c) {
                continue;
            }
            match self.next_free() {
                None => {
                    limits.charge(uncharged);
                    let found = self.color.clone();
                    self.undo_to(base_trail, base_domain);
                    return (Verdict::Feasible(found), nodes);
                }
                Some(p) => {
                    let pending = self.branch_colors(p);
                    stack.push(Frame {
                        point: p as u32,
                        pending,
                        trail_len: self.trail.len(),
                        domain_trail_len: self.domain_trail.len(),
                    });
                }
            }
        }
        limits.charge(uncharged);
        self.undo_to(base_trail, base_domain);
        (Verdict::Infeasible, nodes)
    }
}

/// Runs a complete feasibility search for colorings of `[1, n]`.
pub fn solve(r: usize, k: usize, n: usize, limits: &Limits) -> (Verdict, u64) {
    let inst = Instance::new(r, k, n);
    let mut solver = Solver::new(&inst);
    solver.run(limits, None)
}

/// Decision prefixes handed to each worker, per thread.
const PREFIXES_PER_THREAD: usize = 32;

impl Solver<'_> {
    /// Replays decisions produced by `split` on a fresh solver.
    fn replay(&mut self, prefix: &[(u32, u8)]) {
        for &(p, c) in prefix {
            let ok = self.assign(p, c);
            debug_assert!(ok, "prefix decisions were checked when generated");
        }
    }

    fn reset(&mut self) {
        self.undo_to(0, 0);
    }
}

enum Split {
    Solved(Vec<u8>),
    Frontier(Vec<Vec<(u32, u8)>>),
}

/// Expands the top of the search tree breadth-first until at least
/// `target` open subtrees exist (or the tree is exhausted).
fn split(inst: &Instance, target: usize, nodes: &mut u64) -> Split {
    let mut solver = Solver::new(inst);
    let mut frontier: Vec<Vec<(u32, u8)>> = vec![Vec::new()];
    while !frontier.is_empty() && frontier.len() < target {
        let mut next = Vec::new();
        for prefix in &frontier {
            solver.replay(prefix);
            let Some(p) = solver.next_free() else {
                return Split::Solved(solver.color.clone());
            };
            let mut pending = solver.branch_colors(p);
            while pending != 0 {
                let c = pending.trailing_zeros() as u8 + 1;
                pending &= pending - 1;
                *nodes += 1;
                let (t, d) = (solver.trail.len(), solver.domain_trail.len());
                if solver.assign(p as u32, c) {
                    if solver.next_free().is_none() {
                        return Split::Solved(solver.color.clone());
                    }
                    let mut child = prefix.clone();
                    child.push((p as u32, c));
                    next.push(child);
                }
                solver.undo_to(t, d);
            }
            solver.reset();
        }
        frontier = next;
    }
    Split::Frontier(frontier)
}

/// Like [`solve`], but explores independent subtrees on `threads`
/// workers. The first coloring any worker finds is returned, so the
/// witness may differ from the single-threaded one; the verdict does not.
pub fn solve_parallel(r: usize, k: usize, n: usize, limits: &Limits, threads: usize) -> (Verdict, u64) {
    if threads <= 1 {
        return solve(r, k, n, limits);
    }
    let inst = Instance::new(r, k, n);
    let mut split_nodes = 0u64;
    let frontier = match split(&inst, threads * PREFIXES_PER_THREAD, &mut split_nodes) {
        Split::Solved(colors) => {
            limits.charge(split_nodes);
            return (Verdict::Feasible(colors), split_nodes);
        }
        Split::Frontier(f) => f,
    };
    if !limits.charge(split_nodes) {
        return (Verdict::Aborted, split_nodes);
    }

    let cursor = AtomicUsize::new(0);
    let cancel = AtomicBool::new(false);
    let aborted = AtomicBool::new(false);
    let nodes = AtomicU64::new(split_nodes);
    let found: Mutex<Option<Vec<u8>>> = Mutex::new(None);
    thread::scope(|scope| {
        for _ in 0..threads {
            scope.spawn(|| {
                let mut solver = Solver::new(&inst);
                loop {
                    let i = cursor.fetch_add(1, Ordering::Relaxed);
                    if i >= frontier.len() || cancel.load(Ordering::Relaxed) {
                        break;
                    }
                    solver.replay(&frontier[i]);
                    let (verdict, used) = solver.run(limits, Some(&cancel));
                    solver.reset();
                    nodes.fetch_add(used, Ordering::Relaxed);
                    match verdict {
                        Verdict::Infeasible => {}
                        Verdict::Feasible(colors) => {
                            found.lock().unwrap().get_or_insert(colors);
                            cancel.store(true, Ordering::Relaxed);
                            break;
                        }
                        Verdict::Aborted => {
                            aborted.store(true, Ordering::Relaxed);
                            cancel.store(true, Ordering::Relaxed);
                            break;
                        }
                    }
                }
            });
        }
    });
    let nodes = nodes.into_inner();
    if let Some(colors) = found.into_inner().unwrap() {
        return (Verdict::Feasible(colors), nodes);
    }
    if aborted.into_inner() {
        return (Verdict::Aborted, nodes);
    }
    (Verdict::Infeasible, nodes)
}
