//! Data-parallel helpers. With the `parallel` feature these run on the rayon
//! pool; without it they fall back to plain iterators. Results are identical
//! either way: maps preserve order and searches return the first hit in index
//! order.

/// How batch operations should be executed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Exec {
    Sequential,
    #[default]
    Parallel,
}

#[cfg(feature = "parallel")]
mod imp {
    use rayon::prelude::*;

    pub fn map<T: Sync, R: Send>(items: &[T], f: impl Fn(&T) -> R + Sync + Send) -> Vec<R> {
        items.par_iter().map(f).collect()
    }

    pub fn map_range<R: Send>(n: usize, f: impl Fn(usize) -> R + Sync + Send) -> Vec<R> {
        (0..n).into_par_iter().map(f).collect()
    }

    pub fn find_map_first<T: Sync, R: Send>(
        items: &[T],
        f: impl Fn(&T) -> Option<R> + Sync + Send,
    ) -> Option<R> {
        items.par_iter().find_map_first(f)
    }
}

#[cfg(not(feature = "parallel"))]
mod imp {
    pub fn map<T: Sync, R: Send>(items: &[T], f: impl Fn(&T) -> R + Sync + Send) -> Vec<R> {
        items.iter().map(f).collect()
    }

    pub fn map_range<R: Send>(n: usize, f: impl Fn(usize) -> R + Sync + Send) -> Vec<R> {
        (0..n).map(f).collect()
    }

    pub fn find_map_first<T: Sync, R: Send>(
        items: &[T],
        f: impl Fn(&T) -> Option<R> + Sync + Send,
    ) -> Option<R> {
        items.iter().find_map(f)
    }
}

/// Order-preserving map, parallel when `exec` asks for it and the feature is enabled.
pub fn map_with<T: Sync, R: Send>(exec: Exec, items: &[T], f: impl Fn(&T) -> R + Sync + Send) -> Vec<R> {
    match exec {
        Exec::Sequential => items.iter().map(f).collect(),
        Exec::Parallel => imp::map(items, f),
    }
}

/// First `Some` in index order, searched in parallel when `exec` asks for it.
pub fn find_map_first_with<T: Sync, R: Send>(
    exec: Exec,
    items: &[T],
    f: impl Fn(&T) -> Option<R> + Sync + Send,
) -> Option<R> {
    match exec {
        Exec::Sequential => items.iter().find_map(f),
        Exec::Parallel => imp::find_map_first(items, f),
    }
}

pub(crate) use imp::{find_map_first, map_range};

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn order_is_preserved() {
        let v: Vec<u32> = (0..1000).collect();
        let a = map_with(Exec::Parallel, &v, |x| x * 2);
        let b = map_with(Exec::Sequential, &v, |x| x * 2);
        assert_eq!(a, b);
        assert_eq!(map_range(5, |i| i * i), vec![0, 1, 4, 9, 16]);
    }

    #[test]
    fn first_hit_wins() {
        let v: Vec<u32> = (0..10_000).collect();
        assert_eq!(find_map_first(&v, |&x| (x % 997 == 5 && x > 0).then_some(x)), Some(5));
    }
}
