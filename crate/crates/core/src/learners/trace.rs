//! Decision-site instrumentation emitted while training.
//!
//! Each learner declares a static table of branch points. Training pushes the
//! site id every time the branch is taken; the gray-box search reduces the log
//! to a path signature.

use serde::{Deserialize, Serialize};

/// A statically declared branch point inside a learner.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Site {
    pub id: u64,
    pub name: &'static str,
}

/// Sequence of site ids visited during one training run.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceLog {
    pub sites: Vec<u64>,
}

impl TraceLog {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn is_empty(&self) -> bool {
        self.sites.is_empty()
    }

    pub fn contains(&self, site: Site) -> bool {
        self.sites.contains(&site.id)
    }
}

/// Optional trace sink threaded through training code.
pub(crate) struct Tracer<'a>(pub(crate) Option<&'a mut TraceLog>);

impl Tracer<'_> {
    #[inline]
    pub(crate) fn hit(&mut self, site: Site) {
        if let Some(log) = self.0.as_deref_mut() {
            log.sites.push(site.id);
        }
    }

    pub(crate) fn reborrow(&mut self) -> Tracer<'_> {
        Tracer(self.0.as_deref_mut())
    }
}

macro_rules! site_table {
    ($table:ident { $($name:ident = $id:expr,)* }) => {
        $(pub const $name: Site = Site { id: $id, name: stringify!($name) };)*
        pub const $table: &[Site] = &[$($name,)*];
    };
}
pub(crate) use site_table;
