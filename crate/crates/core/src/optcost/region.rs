use crate::rational::{int, Q};

/// Alur–Dill region over clocks `0..k` with per-clock maximal constants.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Region {
    /// Integer part per clock; `None` once the clock exceeds its constant.
    pub ints: Vec<Option<u32>>,
    /// Bounded clocks with zero fractional part, sorted.
    pub zero: Vec<usize>,
    /// Bounded clocks with positive fractional part, by increasing fraction.
    pub groups: Vec<Vec<usize>>,
}

/// An integer vertex of a region's closure. Unbounded clocks take `max` or
/// `max + 1`, the latter standing for any larger value.
pub type Corner = Vec<u32>;

impl Region {
    pub fn initial(clocks: usize) -> Self {
        Region { ints: vec![Some(0); clocks], zero: (0..clocks).collect(), groups: vec![] }
    }

    pub fn clocks(&self) -> usize {
        self.ints.len()
    }

    /// The region reached by letting time elapse infinitesimally; `None`
    /// when every clock is already unbounded.
    pub fn successor(&self, max: &[u32]) -> Option<Region> {
        let mut r = self.clone();
        if !self.zero.is_empty() {
            let mut moved = Vec::new();
            for &x in &self.zero {
                if self.ints[x] == Some(max[x]) {
                    r.ints[x] = None;
                } else {
                    moved.push(x);
                }
            }
            r.zero.clear();
            if !moved.is_empty() {
                r.groups.insert(0, moved);
            }
            return Some(r);
        }
        let top = r.groups.pop()?;
        for &x in &top {
            r.ints[x] = r.ints[x].map(|v| v + 1);
        }
        r.zero = top;
        r.zero.sort_unstable();
        Some(r)
    }

    pub fn reset(&self, clocks: &[usize]) -> Region {
        let mut r = self.clone();
        for &x in clocks {
            r.ints[x] = Some(0);
        }
        for g in &mut r.groups {
            g.retain(|x| !clocks.contains(x));
        }
        r.groups.retain(|g| !g.is_empty());
        r.zero.retain(|x| !clocks.contains(x));
        r.zero.extend(clocks.iter().copied());
        r.zero.sort_unstable();
        r.zero.dedup();
        r
    }

    pub fn is_corner(&self, c: &[u32], max: &[u32]) -> bool {
        if c.len() != self.clocks() {
            return false;
        }
        for (x, v) in self.ints.iter().enumerate() {
            if v.is_none() && c[x] != max[x] && c[x] != max[x] + 1 {
                return false;
            }
        }
        if self.zero.iter().any(|&x| Some(c[x]) != self.ints[x]) {
            return false;
        }
        let mut up = false;
        for g in &self.groups {
            let lifted = |x: &usize| Some(c[*x]) == self.ints[*x].map(|v| v + 1);
            let lower = |x: &usize| Some(c[*x]) == self.ints[*x];
            if g.iter().all(lifted) {
                up = true;
            } else if up || !g.iter().all(lower) {
                return false;
            }
        }
        true
    }

    pub fn corners(&self, max: &[u32]) -> Vec<Corner> {
        let base: Corner = self.ints.iter().enumerate().map(|(x, v)| v.unwrap_or(max[x])).collect();
        let mut out = Vec::new();
        for j in 0..=self.groups.len() {
            let mut c = base.clone();
            for g in &self.groups[self.groups.len() - j..] {
                for &x in g {
                    c[x] += 1;
                }
            }
            let unbounded: Vec<usize> = (0..self.clocks()).filter(|&x| self.ints[x].is_none()).collect();
            for mask in 0u64..(1 << unbounded.len()) {
                let mut c = c.clone();
                for (i, &x) in unbounded.iter().enumerate() {
                    c[x] += (mask >> i & 1) as u32;
                }
                out.push(c);
            }
        }
        out
    }

    /// Moving one time unit along the diagonal, staying in this region.
    pub fn diagonal(&self, c: &[u32], max: &[u32]) -> Option<Corner> {
        if !self.zero.is_empty() {
            return None;
        }
        let next: Corner = c
            .iter()
            .enumerate()
            .map(|(x, v)| if self.ints[x].is_none() { (v + 1).min(max[x] + 1) } else { v + 1 })
            .collect();
        self.is_corner(&next, max).then_some(next)
    }

    /// A point inside the region.
    pub fn representative(&self, max: &[u32]) -> Vec<Q> {
        let mut out: Vec<Q> =
            self.ints.iter().enumerate().map(|(x, v)| int(v.map_or(max[x] as i64 + 1, |v| v as i64))).collect();
        let m = self.groups.len() as i64 + 1;
        for (k, g) in self.groups.iter().enumerate() {
            for &x in g {
                out[x] += Q::new((k as i64 + 1).into(), m.into());
            }
        }
        out
    }
}
