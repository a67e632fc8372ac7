//! Control-period clock: virtual by default, optionally paced to wall time.

use std::time::{Duration, Instant};

/// Counts control periods and, in realtime mode, sleeps until each period's
/// deadline. A step that starts after its deadline is an overrun; the
/// schedule then restarts from the current instant instead of trying to
/// catch up with a burst of short periods.
#[derive(Debug, Clone)]
pub struct Clock {
    period: f64,
    ticks: u64,
    realtime: Option<Realtime>,
    overruns: u64,
}

#[derive(Debug, Clone)]
struct Realtime {
    start: Instant,
    period: Duration,
    next_deadline: Instant,
}

impl Clock {
    pub fn new(frequency: f64, realtime: bool) -> Self {
        let period = 1.0 / frequency;
        let realtime = realtime.then(|| {
            let now = Instant::now();
            let period = Duration::from_secs_f64(period);
            Realtime {
                start: now,
                period,
                next_deadline: now + period,
            }
        });
        Self {
            period,
            ticks: 0,
            realtime,
            overruns: 0,
        }
    }

    /// Seconds since the clock started. In virtual mode this is exactly
    /// `ticks / frequency`; in realtime mode it is wall time.
    pub fn now(&self) -> f64 {
        match &self.realtime {
            Some(rt) => rt.start.elapsed().as_secs_f64(),
            None => self.ticks as f64 * self.period,
        }
    }

    pub fn ticks(&self) -> u64 {
        self.ticks
    }

    pub fn overruns(&self) -> u64 {
        self.overruns
    }

    pub fn period(&self) -> f64 {
        self.period
    }

    pub fn is_realtime(&self) -> bool {
        self.realtime.is_some()
    }

    /// Ends the current period.
    pub fn tick(&mut self) {
        self.ticks += 1;
        if let Some(rt) = &mut self.realtime {
            let now = Instant::now();
            if now > rt.next_deadline {
                self.overruns += 1;
                rt.next_deadline = now + rt.period;
            } else {
                std::thread::sleep(rt.next_deadline - now);
                rt.next_deadline += rt.period;
            }
        }
    }

    /// Restarts the wall-clock schedule (used after long non-paced work).
    pub fn resync(&mut self) {
        if let Some(rt) = &mut self.realtime {
            rt.next_deadline = Instant::now() + rt.period;
        }
    }
}
