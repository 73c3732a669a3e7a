//! Maximum-weight matching in general graphs (Edmonds' blossom algorithm,
//! primal-dual form, O(n^3)).
//!
//! Integer weights only. Vertex duals are stored doubled so that every
//! intermediate quantity stays integral. The final duals and blossom
//! nesting are kept so callers can certify optimality against edges the
//! solver never saw.

const NONE: usize = usize::MAX;

/// Result of a solve: the matching plus an optimal dual certificate.
#[derive(Debug, Clone)]
pub(crate) struct BlossomSolution {
    nvertex: usize,
    mate: Vec<usize>,
    endpoint: Vec<usize>,
    dualvar: Vec<i64>,
    blossomparent: Vec<usize>,
}

impl BlossomSolution {
    /// Partner of local vertex `v`, if matched.
    pub fn partner(&self, v: usize) -> Option<usize> {
        match self.mate[v] {
            NONE => None,
            p => Some(self.endpoint[p]),
        }
    }

    pub fn pairs(&self) -> Vec<(usize, usize)> {
        (0..self.nvertex)
            .filter_map(|v| self.partner(v).filter(|&u| v < u).map(|u| (v, u)))
            .collect()
    }

    /// Doubled vertex dual (2·y_v). Nonnegative at optimum.
    pub fn vertex_dual(&self, v: usize) -> i64 {
        self.dualvar[v]
    }

    pub fn min_vertex_dual(&self) -> i64 {
        self.dualvar[..self.nvertex].iter().copied().min().unwrap_or(0)
    }

    /// Vertex duals with every blossom dual pushed down onto its leaves,
    /// plus the matched pairs that stay tight under them. Edge slacks can
    /// only grow, so the duals remain feasible for every edge they covered.
    pub fn flatten(&self) -> (Vec<i64>, Vec<(usize, usize)>) {
        let duals: Vec<i64> = (0..self.nvertex)
            .map(|v| self.ancestors(v).map(|b| self.dualvar[b]).sum())
            .collect();
        let pairs = self
            .pairs()
            .into_iter()
            .filter(|&(i, j)| {
                let loose = |x: usize, y: usize| {
                    self.ancestors(x)
                        .skip(1)
                        .any(|b| self.dualvar[b] != 0 && !self.ancestors(y).any(|c| c == b))
                };
                !loose(i, j) && !loose(j, i)
            })
            .collect();
        (duals, pairs)
    }

    fn ancestors(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        std::iter::successors(Some(v), move |&b| {
            Some(self.blossomparent[b]).filter(|&p| p != NONE)
        })
    }

    /// Twice the reduced cost of a (possibly unseen) edge `i`–`j` of weight
    /// `w`. The matching stays optimal after adding the edge iff this is
    /// nonnegative.
    pub fn reduced_cost2(&self, i: usize, j: usize, w: i64) -> i64 {
        let mut s = self.dualvar[i] + self.dualvar[j] - 2 * w;
        if s >= 0 {
            // blossom duals are nonnegative, they can only add slack
            return s;
        }
        let chain = |mut b: usize| {
            let mut out = vec![b];
            while self.blossomparent[b] != NONE {
                b = self.blossomparent[b];
                out.push(b);
            }
            out.reverse();
            out
        };
        let bi = chain(i);
        let bj = chain(j);
        for (a, b) in bi.iter().zip(bj.iter()) {
            if a != b {
                break;
            }
            s += 2 * self.dualvar[*a];
        }
        s
    }
}

/// Solve maximum-weight (not maximum-cardinality) matching on vertices
/// `0..nvertex`. Edges must have distinct endpoints; weights may be zero.
pub(crate) fn solve(nvertex: usize, edges: &[(usize, usize, i64)]) -> BlossomSolution {
    let st = State::new(nvertex, edges);
    finish(st)
}

/// Like [`solve`], but starting from feasible doubled vertex duals and a
/// matching (edge indices into `edges`) whose edges are all tight under
/// them. Exposed vertices may carry any nonnegative dual.
pub(crate) fn solve_warm(
    nvertex: usize,
    edges: &[(usize, usize, i64)],
    duals: &[i64],
    matched: &[usize],
) -> BlossomSolution {
    let mut st = State::new(nvertex, edges);
    st.dualvar[..nvertex].copy_from_slice(duals);
    for &k in matched {
        let (i, j, w) = edges[k];
        debug_assert_eq!(duals[i] + duals[j], 2 * w, "warm edge not tight");
        st.mate[i] = 2 * k + 1;
        st.mate[j] = 2 * k;
    }
    finish(st)
}

fn finish(mut st: State<'_>) -> BlossomSolution {
    if !st.edges.is_empty() {
        st.run();
    }
    BlossomSolution {
        nvertex: st.nvertex,
        mate: st.mate,
        endpoint: st.endpoint,
        dualvar: st.dualvar,
        blossomparent: st.blossomparent,
    }
}

struct State<'a> {
    nvertex: usize,
    edges: &'a [(usize, usize, i64)],
    endpoint: Vec<usize>,
    neighbend: Vec<Vec<usize>>,
    mate: Vec<usize>,
    label: Vec<i32>,
    labelend: Vec<usize>,
    inblossom: Vec<usize>,
    blossomparent: Vec<usize>,
    blossomchilds: Vec<Vec<usize>>,
    blossombase: Vec<usize>,
    blossomendps: Vec<Vec<usize>>,
    bestedge: Vec<usize>,
    blossombestedges: Vec<Option<Vec<usize>>>,
    unusedblossoms: Vec<usize>,
    dualvar: Vec<i64>,
    allowedge: Vec<bool>,
    queue: Vec<usize>,
}

#[inline]
fn wrap(j: isize, len: usize) -> usize {
    j.rem_euclid(len as isize) as usize
}

impl<'a> State<'a> {
    fn new(nvertex: usize, edges: &'a [(usize, usize, i64)]) -> Self {
        let nedge = edges.len();
        let maxweight = edges.iter().map(|e| e.2).max().unwrap_or(0).max(0);
        let mut endpoint = Vec::with_capacity(2 * nedge);
        let mut neighbend = vec![Vec::new(); nvertex];
        for (k, &(i, j, _)) in edges.iter().enumerate() {
            debug_assert!(i != j && i < nvertex && j < nvertex);
            endpoint.push(i);
            endpoint.push(j);
            neighbend[i].push(2 * k + 1);
            neighbend[j].push(2 * k);
        }
        let mut blossombase: Vec<usize> = (0..nvertex).collect();
        blossombase.extend(std::iter::repeat_n(NONE, nvertex));
        let mut dualvar = vec![maxweight; nvertex];
        dualvar.extend(std::iter::repeat_n(0, nvertex));
        State {
            nvertex,
            edges,
            endpoint,
            neighbend,
            mate: vec![NONE; nvertex],
            label: vec![0; 2 * nvertex],
            labelend: vec![NONE; 2 * nvertex],
            inblossom: (0..nvertex).collect(),
            blossomparent: vec![NONE; 2 * nvertex],
            blossomchilds: vec![Vec::new(); 2 * nvertex],
            blossombase,
            blossomendps: vec![Vec::new(); 2 * nvertex],
            bestedge: vec![NONE; 2 * nvertex],
            blossombestedges: vec![None; 2 * nvertex],
            unusedblossoms: (nvertex..2 * nvertex).collect(),
            dualvar,
            allowedge: vec![false; nedge],
            queue: Vec::new(),
        }
    }

    #[inline]
    fn slack(&self, k: usize) -> i64 {
        let (i, j, w) = self.edges[k];
        self.dualvar[i] + self.dualvar[j] - 2 * w
    }

    fn blossom_leaves(&self, b: usize, out: &mut Vec<usize>) {
        if b < self.nvertex {
            out.push(b);
        } else {
            for &t in &self.blossomchilds[b] {
                if t < self.nvertex {
                    out.push(t);
                } else {
                    self.blossom_leaves(t, out);
                }
            }
        }
    }

    fn leaves(&self, b: usize) -> Vec<usize> {
        let mut out = Vec::new();
        self.blossom_leaves(b, &mut out);
        out
    }

    fn assign_label(&mut self, w: usize, t: i32, p: usize) {
        let b = self.inblossom[w];
        debug_assert!(self.label[w] == 0 && self.label[b] == 0);
        self.label[w] = t;
        self.label[b] = t;
        self.labelend[w] = p;
        self.labelend[b] = p;
        self.bestedge[w] = NONE;
        self.bestedge[b] = NONE;
        if t == 1 {
            let mut leaves = Vec::new();
            self.blossom_leaves(b, &mut leaves);
            self.queue.extend(leaves);
        } else if t == 2 {
            let base = self.blossombase[b];
            let mb = self.mate[base];
            debug_assert!(mb != NONE);
            self.assign_label(self.endpoint[mb], 1, mb ^ 1);
        }
    }

    fn scan_blossom(&mut self, mut v: usize, mut w: usize) -> usize {
        let mut path = Vec::new();
        let mut base = NONE;
        while v != NONE || w != NONE {
            let mut b = self.inblossom[v];
            if self.label[b] & 4 != 0 {
                base = self.blossombase[b];
                break;
            }
            path.push(b);
            self.label[b] = 5;
            if self.labelend[b] == NONE {
                v = NONE;
            } else {
                v = self.endpoint[self.labelend[b]];
                b = self.inblossom[v];
                v = self.endpoint[self.labelend[b]];
            }
            if w != NONE {
                std::mem::swap(&mut v, &mut w);
            }
        }
        for b in path {
            self.label[b] = 1;
        }
        base
    }

    fn add_blossom(&mut self, base: usize, k: usize) {
        let (mut v, mut w, _) = self.edges[k];
        let bb = self.inblossom[base];
        let mut bv = self.inblossom[v];
        let mut bw = self.inblossom[w];
        let b = self.unusedblossoms.pop().expect("blossom pool exhausted");
        self.blossombase[b] = base;
        self.blossomparent[b] = NONE;
        self.blossomparent[bb] = b;
        let mut path = Vec::new();
        let mut endps = Vec::new();
        while bv != bb {
            self.blossomparent[bv] = b;
            path.push(bv);
            endps.push(self.labelend[bv]);
            v = self.endpoint[self.labelend[bv]];
            bv = self.inblossom[v];
        }
        path.push(bb);
        path.reverse();
        endps.reverse();
        endps.push(2 * k);
        while bw != bb {
            self.blossomparent[bw] = b;
            path.push(bw);
            endps.push(self.labelend[bw] ^ 1);
            w = self.endpoint[self.labelend[bw]];
            bw = self.inblossom[w];
        }
        self.blossomchilds[b] = path.clone();
        self.blossomendps[b] = endps;
        self.label[b] = 1;
        self.labelend[b] = self.labelend[bb];
        self.dualvar[b] = 0;
        for v in self.leaves(b) {
            if self.label[self.inblossom[v]] == 2 {
                self.queue.push(v);
            }
            self.inblossom[v] = b;
        }

        let mut bestedgeto = vec![NONE; 2 * self.nvertex];
        for &bv in &path {
            let nblists: Vec<Vec<usize>> = match self.blossombestedges[bv].take() {
                Some(list) => vec![list],
                None => self
                    .leaves(bv)
                    .into_iter()
                    .map(|v| self.neighbend[v].iter().map(|p| p / 2).collect())
                    .collect(),
            };
            for nblist in nblists {
                for k in nblist {
                    let (mut i, mut j, _) = self.edges[k];
                    if self.inblossom[j] == b {
                        std::mem::swap(&mut i, &mut j);
                    }
                    let _ = i;
                    let bj = self.inblossom[j];
                    if bj != b
                        && self.label[bj] == 1
                        && (bestedgeto[bj] == NONE || self.slack(k) < self.slack(bestedgeto[bj]))
                    {
                        bestedgeto[bj] = k;
                    }
                }
            }
            self.bestedge[bv] = NONE;
        }
        let list: Vec<usize> = bestedgeto.into_iter().filter(|&k| k != NONE).collect();
        let mut best = NONE;
        for &k in &list {
            if best == NONE || self.slack(k) < self.slack(best) {
                best = k;
            }
        }
        self.blossombestedges[b] = Some(list);
        self.bestedge[b] = best;
    }

    fn expand_blossom(&mut self, b: usize, endstage: bool) {
        let childs = self.blossomchilds[b].clone();
        for &s in &childs {
            self.blossomparent[s] = NONE;
            if s < self.nvertex {
                self.inblossom[s] = s;
            } else if endstage && self.dualvar[s] == 0 {
                self.expand_blossom(s, endstage);
            } else {
                for v in self.leaves(s) {
                    self.inblossom[v] = s;
                }
            }
        }
        if !endstage && self.label[b] == 2 {
            let len = childs.len();
            let entrychild = self.inblossom[self.endpoint[self.labelend[b] ^ 1]];
            let mut j = childs.iter().position(|&c| c == entrychild).unwrap() as isize;
            let (jstep, endptrick): (isize, usize) = if j & 1 != 0 {
                j -= len as isize;
                (1, 0)
            } else {
                (-1, 1)
            };
            let endps = self.blossomendps[b].clone();
            let mut p = self.labelend[b];
            while j != 0 {
                let q = endps[wrap(j - endptrick as isize, len)];
                self.label[self.endpoint[p ^ 1]] = 0;
                self.label[self.endpoint[q ^ endptrick ^ 1]] = 0;
                self.assign_label(self.endpoint[p ^ 1], 2, p);
                self.allowedge[q / 2] = true;
                j += jstep;
                p = endps[wrap(j - endptrick as isize, len)] ^ endptrick;
                self.allowedge[p / 2] = true;
                j += jstep;
            }
            let bv = childs[wrap(j, len)];
            let ep = self.endpoint[p ^ 1];
            self.label[ep] = 2;
            self.label[bv] = 2;
            self.labelend[ep] = p;
            self.labelend[bv] = p;
            self.bestedge[bv] = NONE;
            j += jstep;
            while childs[wrap(j, len)] != entrychild {
                let bv = childs[wrap(j, len)];
                if self.label[bv] == 1 {
                    j += jstep;
                    continue;
                }
                let mut found = NONE;
                for v in self.leaves(bv) {
                    if self.label[v] != 0 {
                        found = v;
                        break;
                    }
                }
                if found != NONE {
                    let v = found;
                    self.label[v] = 0;
                    let mb = self.mate[self.blossombase[bv]];
                    self.label[self.endpoint[mb]] = 0;
                    self.assign_label(v, 2, self.labelend[v]);
                }
                j += jstep;
            }
        }
        self.label[b] = -1;
        self.labelend[b] = NONE;
        self.blossomchilds[b].clear();
        self.blossomendps[b].clear();
        self.blossombase[b] = NONE;
        self.blossombestedges[b] = None;
        self.bestedge[b] = NONE;
        self.unusedblossoms.push(b);
    }

    fn augment_blossom(&mut self, b: usize, v: usize) {
        let mut t = v;
        while self.blossomparent[t] != b {
            t = self.blossomparent[t];
        }
        if t >= self.nvertex {
            self.augment_blossom(t, v);
        }
        let len = self.blossomchilds[b].len();
        let i = self.blossomchilds[b].iter().position(|&c| c == t).unwrap();
        let mut j = i as isize;
        let (jstep, endptrick): (isize, usize) = if i & 1 != 0 {
            j -= len as isize;
            (1, 0)
        } else {
            (-1, 1)
        };
        while j != 0 {
            j += jstep;
            let t = self.blossomchilds[b][wrap(j, len)];
            let p = self.blossomendps[b][wrap(j - endptrick as isize, len)] ^ endptrick;
            if t >= self.nvertex {
                self.augment_blossom(t, self.endpoint[p]);
            }
            j += jstep;
            let t = self.blossomchilds[b][wrap(j, len)];
            if t >= self.nvertex {
                self.augment_blossom(t, self.endpoint[p ^ 1]);
            }
            self.mate[self.endpoint[p]] = p ^ 1;
            self.mate[self.endpoint[p ^ 1]] = p;
        }
        self.blossomchilds[b].rotate_left(i);
        self.blossomendps[b].rotate_left(i);
        self.blossombase[b] = self.blossombase[self.blossomchilds[b][0]];
        debug_assert_eq!(self.blossombase[b], v);
    }

    /// Flip the alternating path from `s` back to its tree root, giving `s`
    /// the mate endpoint `p` (or leaving it exposed when `p` is `NONE`).
    fn augment_side(&mut self, mut s: usize, mut p: usize) {
        loop {
            let bs = self.inblossom[s];
            if bs >= self.nvertex {
                self.augment_blossom(bs, s);
            }
            self.mate[s] = p;
            if self.labelend[bs] == NONE {
                break;
            }
            let t = self.endpoint[self.labelend[bs]];
            let bt = self.inblossom[t];
            s = self.endpoint[self.labelend[bt]];
            let j = self.endpoint[self.labelend[bt] ^ 1];
            if bt >= self.nvertex {
                self.augment_blossom(bt, j);
            }
            self.mate[j] = self.labelend[bt];
            p = self.labelend[bt] ^ 1;
        }
    }

    fn augment_matching(&mut self, k: usize) {
        let (v, w, _) = self.edges[k];
        self.augment_side(v, 2 * k + 1);
        self.augment_side(w, 2 * k);
    }

    /// Each stage grows alternating trees from the exposed vertices with the
    /// largest dual (all of them on a cold start). A stage ends when a path
    /// reaches another exposed vertex, or when some outer vertex's dual hits
    /// zero: that vertex is then made exposed by flipping its tree path.
    /// The optimum is reached once every exposed vertex has zero dual.
    fn run(&mut self) {
        let nv = self.nvertex;
        loop {
            let top = (0..nv)
                .filter(|&v| self.mate[v] == NONE)
                .map(|v| self.dualvar[v])
                .max()
                .unwrap_or(0);
            if top <= 0 {
                break;
            }
            self.label.iter_mut().for_each(|l| *l = 0);
            self.labelend.iter_mut().for_each(|l| *l = NONE);
            self.bestedge.iter_mut().for_each(|b| *b = NONE);
            for b in nv..2 * nv {
                self.blossombestedges[b] = None;
            }
            self.allowedge.iter_mut().for_each(|a| *a = false);
            self.queue.clear();
            for v in 0..nv {
                if self.mate[v] == NONE && self.dualvar[v] == top && self.label[self.inblossom[v]] == 0 {
                    self.assign_label(v, 1, NONE);
                }
            }

            loop {
                let mut done = false;
                while let Some(v) = self.queue.pop() {
                    for idx in 0..self.neighbend[v].len() {
                        let p = self.neighbend[v][idx];
                        let k = p / 2;
                        let w = self.endpoint[p];
                        if self.inblossom[v] == self.inblossom[w] {
                            continue;
                        }
                        let mut kslack = 0;
                        if !self.allowedge[k] {
                            kslack = self.slack(k);
                            if kslack <= 0 {
                                self.allowedge[k] = true;
                            }
                        }
                        if self.allowedge[k] {
                            let bw = self.inblossom[w];
                            if self.label[bw] == 0 {
                                if self.mate[self.blossombase[bw]] == NONE {
                                    // exposed vertex outside the forest
                                    self.augment_matching(k);
                                    done = true;
                                    break;
                                }
                                self.assign_label(w, 2, p ^ 1);
                            } else if self.label[bw] == 1 {
                                let base = self.scan_blossom(v, w);
                                if base != NONE {
                                    self.add_blossom(base, k);
                                } else {
                                    self.augment_matching(k);
                                    done = true;
                                    break;
                                }
                            } else if self.label[w] == 0 {
                                self.label[w] = 2;
                                self.labelend[w] = p ^ 1;
                            }
                        } else if self.label[self.inblossom[w]] == 1 {
                            let b = self.inblossom[v];
                            if self.bestedge[b] == NONE || kslack < self.slack(self.bestedge[b]) {
                                self.bestedge[b] = k;
                            }
                        } else if self.label[w] == 0
                            && (self.bestedge[w] == NONE || kslack < self.slack(self.bestedge[w]))
                        {
                            self.bestedge[w] = k;
                        }
                    }
                    if done {
                        break;
                    }
                }
                if done {
                    break;
                }

                // No augmenting path under the current duals: pick the
                // largest dual step that keeps every constraint satisfied.
                let mut deltatype = 1;
                let mut delta = i64::MAX;
                let mut deltavertex = NONE;
                for v in 0..nv {
                    if self.label[self.inblossom[v]] == 1 {
                        let d = self.dualvar[v];
                        // prefer exposed vertices on ties
                        if d < delta || (d == delta && self.mate[v] == NONE) {
                            delta = d;
                            deltavertex = v;
                        }
                    }
                }
                let mut deltaedge = NONE;
                let mut deltablossom = NONE;
                for v in 0..nv {
                    if self.label[self.inblossom[v]] == 0 && self.bestedge[v] != NONE {
                        let d = self.slack(self.bestedge[v]);
                        if d < delta {
                            delta = d;
                            deltatype = 2;
                            deltaedge = self.bestedge[v];
                        }
                    }
                }
                for b in 0..2 * nv {
                    if self.blossomparent[b] == NONE && self.label[b] == 1 && self.bestedge[b] != NONE {
                        let kslack = self.slack(self.bestedge[b]);
                        debug_assert!(kslack % 2 == 0);
                        let d = kslack / 2;
                        if d < delta {
                            delta = d;
                            deltatype = 3;
                            deltaedge = self.bestedge[b];
                        }
                    }
                }
                for b in nv..2 * nv {
                    if self.blossombase[b] != NONE
                        && self.blossomparent[b] == NONE
                        && self.label[b] == 2
                        && self.dualvar[b] < delta
                    {
                        delta = self.dualvar[b];
                        deltatype = 4;
                        deltablossom = b;
                    }
                }

                for v in 0..nv {
                    match self.label[self.inblossom[v]] {
                        1 => self.dualvar[v] -= delta,
                        2 => self.dualvar[v] += delta,
                        _ => {}
                    }
                }
                for b in nv..2 * nv {
                    if self.blossombase[b] != NONE && self.blossomparent[b] == NONE {
                        match self.label[b] {
                            1 => self.dualvar[b] += delta,
                            2 => self.dualvar[b] -= delta,
                            _ => {}
                        }
                    }
                }

                match deltatype {
                    1 => {
                        if self.mate[deltavertex] != NONE {
                            self.augment_side(deltavertex, NONE);
                        }
                        break;
                    }
                    2 => {
                        self.allowedge[deltaedge] = true;
                        let (mut i, j, _) = self.edges[deltaedge];
                        if self.label[self.inblossom[i]] == 0 {
                            i = j;
                        }
                        self.queue.push(i);
                    }
                    3 => {
                        self.allowedge[deltaedge] = true;
                        let (i, _, _) = self.edges[deltaedge];
                        self.queue.push(i);
                    }
                    _ => self.expand_blossom(deltablossom, false),
                }
            }

            for b in nv..2 * nv {
                if self.blossomparent[b] == NONE
                    && self.blossombase[b] != NONE
                    && self.label[b] == 1
                    && self.dualvar[b] == 0
                {
                    self.expand_blossom(b, true);
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn weight(sol: &BlossomSolution, edges: &[(usize, usize, i64)]) -> i64 {
        let pairs = sol.pairs();
        edges
            .iter()
            .filter(|&&(i, j, _)| pairs.contains(&(i.min(j), i.max(j))))
            .map(|e| e.2)
            .sum()
    }

    fn brute(n: usize, edges: &[(usize, usize, i64)]) -> i64 {
        fn go(k: usize, used: u64, edges: &[(usize, usize, i64)]) -> i64 {
            if k == edges.len() {
                return 0;
            }
            let skip = go(k + 1, used, edges);
            let (i, j, w) = edges[k];
            if used & (1 << i) == 0 && used & (1 << j) == 0 {
                skip.max(w + go(k + 1, used | 1 << i | 1 << j, edges))
            } else {
                skip
            }
        }
        assert!(n <= 64);
        go(0, 0, edges)
    }

    #[test]
    fn single_edge() {
        let e = [(0, 1, 5)];
        let s = solve(2, &e);
        assert_eq!(s.pairs(), vec![(0, 1)]);
    }

    #[test]
    fn empty() {
        let s = solve(3, &[]);
        assert!(s.pairs().is_empty());
    }

    #[test]
    fn path_prefers_outer_edges() {
        let e = [(0, 1, 3), (1, 2, 2), (2, 3, 3)];
        let s = solve(4, &e);
        assert_eq!(s.pairs(), vec![(0, 1), (2, 3)]);
    }

    #[test]
    fn classic_blossom_cases() {
        // cases from the reference test-suite of the original algorithm
        let cases = [
            (4, vec![(1, 2, 8), (1, 3, 9), (2, 3, 10), (3, 0, 7)]),
            (
                7,
                vec![(1, 2, 9), (1, 3, 8), (2, 3, 10), (1, 4, 5), (4, 5, 4), (1, 6, 3)],
            ),
            (
                7,
                vec![
                    (1, 2, 9),
                    (1, 3, 9),
                    (2, 3, 10),
                    (2, 4, 8),
                    (3, 5, 8),
                    (4, 5, 10),
                    (5, 6, 6),
                ],
            ),
            (
                9,
                vec![
                    (1, 2, 45),
                    (1, 5, 45),
                    (2, 3, 50),
                    (3, 4, 45),
                    (4, 5, 50),
                    (1, 6, 30),
                    (3, 8, 35),
                    (4, 7, 35),
                    (5, 7, 26),
                    (6, 7, 5),
                ],
            ),
        ];
        for (n, edges) in cases {
            let s = solve(n, &edges);
            assert_eq!(weight(&s, &edges), brute(n, &edges), "{edges:?}");
        }
    }

    #[test]
    fn random_graphs_match_brute_force_and_certify() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..400 {
            let n = rng.gen_range(2..=11);
            let mut edges = Vec::new();
            for i in 0..n {
                for j in i + 1..n {
                    if rng.gen_bool(0.6) {
                        edges.push((i, j, rng.gen_range(0..30)));
                    }
                }
            }
            let s = solve(n, &edges);
            assert_eq!(weight(&s, &edges), brute(n, &edges));
            for &(i, j, w) in &edges {
                assert!(s.reduced_cost2(i, j, w) >= 0);
            }
            for v in 0..n {
                assert!(s.vertex_dual(v) >= 0);
                if s.partner(v).is_none() {
                    assert_eq!(s.vertex_dual(v), 0);
                }
            }
        }
    }

    #[test]
    fn warm_start_after_vertex_changes() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..400 {
            let n = rng.gen_range(3..=11);
            let w: Vec<Vec<Option<i64>>> = (0..n)
                .map(|i| {
                    (0..n)
                        .map(|j| (j > i && rng.gen_bool(0.7)).then(|| rng.gen_range(0..40)))
                        .collect()
                })
                .collect();
            let edges_of = |alive: &[bool]| -> Vec<(usize, usize, i64)> {
                let mut e = Vec::new();
                for i in 0..n {
                    for j in i + 1..n {
                        if let (true, true, Some(x)) = (alive[i], alive[j], w[i][j]) {
                            e.push((i, j, x));
                        }
                    }
                }
                e
            };
            // the last vertex arrives late, a random earlier one leaves
            let mut alive = vec![true; n];
            alive[n - 1] = false;
            let first = solve(n, &edges_of(&alive));
            let (mut duals, pairs) = first.flatten();
            alive[n - 1] = true;
            let gone = rng.gen_range(0..n - 1);
            alive[gone] = false;
            duals[gone] = 0;
            let edges = edges_of(&alive);
            duals[n - 1] = edges
                .iter()
                .filter(|e| e.0 == n - 1 || e.1 == n - 1)
                .map(|&(i, j, x)| 2 * x - duals[i + j - (n - 1)])
                .max()
                .unwrap_or(0)
                .max(0);
            let matched: Vec<usize> = pairs
                .iter()
                .filter(|&&(i, j)| i != gone && j != gone)
                .map(|&(i, j)| edges.iter().position(|e| (e.0, e.1) == (i, j)).unwrap())
                .collect();
            let s = solve_warm(n, &edges, &duals, &matched);
            assert_eq!(weight(&s, &edges), brute(n, &edges));
            for &(i, j, x) in &edges {
                assert!(s.reduced_cost2(i, j, x) >= 0);
            }
        }
    }
}
