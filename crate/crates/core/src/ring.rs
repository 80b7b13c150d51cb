//! Fixed-capacity storage keyed by absolute 1-based index.

/// Keeps the most recent `capacity` entries pushed (all of them when
/// unbounded). Entry `i` lives in slot `(i − 1) mod capacity`, so pushing
/// overwrites the oldest slot in place.
#[derive(Clone, Debug)]
pub struct Ring<E> {
    capacity: Option<usize>,
    data: Vec<E>,
    len: usize,
}

impl<E> Ring<E> {
    pub fn bounded(capacity: usize) -> Self {
        assert!(capacity > 0, "ring capacity must be positive");
        Self {
            capacity: Some(capacity),
            data: Vec::with_capacity(capacity),
            len: 0,
        }
    }

    pub fn unbounded() -> Self {
        Self {
            capacity: None,
            data: Vec::new(),
            len: 0,
        }
    }

    /// Total number of entries ever pushed; the newest has index `len()`.
    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Number of entries currently retained.
    pub fn retained(&self) -> usize {
        self.data.len()
    }

    /// Index of the oldest retained entry.
    pub fn oldest(&self) -> usize {
        self.len + 1 - self.data.len()
    }

    fn slot(&self, i: usize) -> usize {
        match self.capacity {
            Some(c) => (i - 1) % c,
            None => i - 1,
        }
    }

    pub fn get(&self, i: usize) -> Option<&E> {
        if i == 0 || i > self.len || i < self.oldest() {
            return None;
        }
        self.data.get(self.slot(i))
    }

    /// Appends entry `len() + 1`, evicting the oldest when full.
    pub fn push(&mut self, e: E) {
        self.len += 1;
        let slot = self.slot(self.len);
        if slot < self.data.len() {
            self.data[slot] = e;
        } else {
            self.data.push(e);
        }
    }

    /// Mutable access to the slot the next push would overwrite, if full.
    pub fn recycle(&mut self) -> Option<&mut E> {
        match self.capacity {
            Some(c) if self.data.len() == c => {
                let slot = self.slot(self.len + 1);
                self.data.get_mut(slot)
            }
            _ => None,
        }
    }

    /// Marks the recycled slot as entry `len() + 1`.
    pub fn commit_recycled(&mut self) {
        debug_assert!(matches!(self.capacity, Some(c) if self.data.len() == c));
        self.len += 1;
    }

    /// Retained entries from oldest to newest with their indices.
    pub fn iter(&self) -> impl DoubleEndedIterator<Item = (usize, &E)> + '_ {
        (self.oldest()..=self.len).map(move |i| (i, &self.data[self.slot(i)]))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bounded_ring_keeps_latest() {
        let mut r = Ring::bounded(3);
        for i in 1..=5 {
            r.push(i * 10);
        }
        assert_eq!(r.len(), 5);
        assert_eq!(r.retained(), 3);
        assert_eq!(r.oldest(), 3);
        assert_eq!(r.get(2), None);
        assert_eq!(r.get(3), Some(&30));
        assert_eq!(r.get(5), Some(&50));
        assert_eq!(r.get(6), None);
        let v: Vec<_> = r.iter().map(|(i, &e)| (i, e)).collect();
        assert_eq!(v, vec![(3, 30), (4, 40), (5, 50)]);
    }

    #[test]
    fn recycle_overwrites_oldest() {
        let mut r = Ring::bounded(2);
        r.push(vec![1]);
        assert!(r.recycle().is_none());
        r.push(vec![2]);
        r.recycle().unwrap()[0] = 3;
        r.commit_recycled();
        assert_eq!(r.get(3), Some(&vec![3]));
        assert_eq!(r.get(1), None);
    }

    #[test]
    fn unbounded_keeps_everything() {
        let mut r = Ring::unbounded();
        for i in 0..100 {
            r.push(i);
        }
        assert_eq!(r.get(1), Some(&0));
        assert_eq!(r.oldest(), 1);
    }
}
