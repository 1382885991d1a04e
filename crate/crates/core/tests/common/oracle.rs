//! Brute-force reference n-gram model: nested loops over every position,
//! formulas evaluated directly. Shares no code with the library.

pub struct Oracle {
    pub sentences: Vec<Vec<u8>>,
    pub n: usize,
}

impl Oracle {
    pub fn new(sentences: Vec<Vec<u8>>, n: usize) -> Self {
        Self { sentences, n }
    }

    fn windows(&self) -> Vec<&[u8]> {
        let mut out = Vec::new();
        for s in &self.sentences {
            if s.len() < self.n {
                continue;
            }
            for i in 0..=s.len() - self.n {
                out.push(&s[i..i + self.n]);
            }
        }
        out
    }

    pub fn vocabulary(&self) -> Vec<u8> {
        let mut v: Vec<u8> = Vec::new();
        for s in &self.sentences {
            for &g in s {
                if !v.contains(&g) {
                    v.push(g);
                }
            }
        }
        v.sort();
        v
    }

    pub fn count(&self, context: &[u8], w: u8) -> u64 {
        let mut c = 0;
        for win in self.windows() {
            if &win[..self.n - 1] == context && win[self.n - 1] == w {
                c += 1;
            }
        }
        c
    }

    pub fn context_count(&self, context: &[u8]) -> u64 {
        let mut c = 0;
        for win in self.windows() {
            if &win[..self.n - 1] == context {
                c += 1;
            }
        }
        c
    }

    fn types(&self) -> Vec<Vec<u8>> {
        let mut t: Vec<Vec<u8>> = Vec::new();
        for win in self.windows() {
            if !t.iter().any(|x| x == win) {
                t.push(win.to_vec());
            }
        }
        t
    }

    pub fn laplace(&self, context: &[u8], w: u8) -> f64 {
        let v = self.vocabulary().len() as f64;
        (self.count(context, w) as f64 + 1.0) / (self.context_count(context) as f64 + v)
    }

    pub fn kneser_ney(&self, context: &[u8], w: u8, discount: f64, floor_divisor: f64) -> f64 {
        let types = self.types();
        if types.is_empty() {
            return 1.0 / self.vocabulary().len() as f64;
        }
        let mut contexts_before_w = 0;
        for t in &types {
            if t[self.n - 1] == w {
                contexts_before_w += 1;
            }
        }
        let p_cont = contexts_before_w as f64 / types.len() as f64;
        let cc = self.context_count(context) as f64;
        let p = if cc == 0.0 {
            p_cont
        } else {
            let mut followers = 0;
            for t in &types {
                if &t[..self.n - 1] == context {
                    followers += 1;
                }
            }
            let c = self.count(context, w) as f64;
            f64::max(c - discount, 0.0) / cc + discount * followers as f64 / cc * p_cont
        };
        if p > 0.0 {
            p
        } else {
            1.0 / (floor_divisor * types.len() as f64)
        }
    }

    /// Self-scored cross-entropy in nats; `None` when no position exists.
    pub fn cross_entropy(&self, prob: impl Fn(&[u8], u8) -> f64) -> Option<f64> {
        let wins = self.windows();
        if wins.is_empty() {
            return None;
        }
        let mut total = 0.0;
        for win in &wins {
            total += prob(&win[..self.n - 1], win[self.n - 1]).ln();
        }
        Some(-total / wins.len() as f64)
    }

    pub fn reversed(&self) -> Oracle {
        Oracle::new(
            self.sentences
                .iter()
                .map(|s| s.iter().rev().copied().collect())
                .collect(),
            self.n,
        )
    }
}

/// Every sequence of `len` symbols drawn from `alphabet`.
pub fn all_contexts(alphabet: &[u8], len: usize) -> Vec<Vec<u8>> {
    let mut out = vec![Vec::new()];
    for _ in 0..len {
        let mut next = Vec::new();
        for prefix in &out {
            for &g in alphabet {
                let mut p = prefix.clone();
                p.push(g);
                next.push(p);
            }
        }
        out = next;
    }
    out
}

pub fn relative_error(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        (a - b).abs() / a.abs().max(b.abs())
    }
}
