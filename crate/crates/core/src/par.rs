//! Thin shims so hot loops can run on rayon when the `parallel` feature is
//! enabled and fall back to plain iteration otherwise (wasm32 browsers have
//! no threads).

#[cfg(feature = "parallel")]
pub fn map_rows<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    use rayon::prelude::*;
    (0..n).into_par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
pub fn map_rows<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    (0..n).map(f).collect()
}

#[cfg(feature = "parallel")]
pub fn try_for_each_slot<T, W, E, I, F>(slots: &mut [T], init: I, f: F) -> Result<(), E>
where
    T: Send,
    W: Send,
    E: Send,
    I: Fn() -> W + Sync + Send,
    F: Fn(&mut W, &mut T) -> Result<(), E> + Sync + Send,
{
    use rayon::prelude::*;
    slots.par_iter_mut().try_for_each_init(&init, |w, s| f(w, s))
}

#[cfg(not(feature = "parallel"))]
pub fn try_for_each_slot<T, W, E, I, F>(slots: &mut [T], init: I, f: F) -> Result<(), E>
where
    T: Send,
    W: Send,
    E: Send,
    I: Fn() -> W + Sync + Send,
    F: Fn(&mut W, &mut T) -> Result<(), E> + Sync + Send,
{
    let mut w = init();
    slots.iter_mut().try_for_each(|s| f(&mut w, s))
}

/// Wall-clock seconds of `f`, or plain execution with a zero reading where
/// no monotonic clock exists (wasm32).
pub fn timed<T>(f: impl FnOnce() -> T) -> (T, f64) {
    #[cfg(not(target_arch = "wasm32"))]
    {
        let start = std::time::Instant::now();
        let out = f();
        (out, start.elapsed().as_secs_f64())
    }
    #[cfg(target_arch = "wasm32")]
    {
        (f(), 0.0)
    }
}
