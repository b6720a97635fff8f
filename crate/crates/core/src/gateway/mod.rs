//! Uniform LLM completion interface.
//!
//! Every LLM-dependent stage issues [`CompletionRequest`]s through a
//! [`Gateway`], which dispatches by stage tag to either a live
//! OpenAI-compatible HTTP backend or a deterministic scripted mock. The
//! gateway never mutates prompt text and bounds concurrent in-flight calls.

mod http;
mod mock;
mod templates;

pub use http::HttpBackend;
pub use mock::{MockBackend, MockRule, MockScript};
pub use templates::{render_template, PromptTemplates};

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::sync::{Arc, Condvar, Mutex};

/// Which pipeline stage produced a request. Routing and prompt templates key
/// off this tag.
#[derive(
    Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize,
)]
#[serde(rename_all = "lowercase")]
pub enum StageTag {
    Extract,
    Group,
    Local,
    Select,
    Synthesize,
    Align,
    Judge,
}

impl StageTag {
    pub const ALL: [StageTag; 7] = [
        StageTag::Extract,
        StageTag::Group,
        StageTag::Local,
        StageTag::Select,
        StageTag::Synthesize,
        StageTag::Align,
        StageTag::Judge,
    ];

    pub fn name(self) -> &'static str {
        match self {
            StageTag::Extract => "extract",
            StageTag::Group => "group",
            StageTag::Local => "local",
            StageTag::Select => "select",
            StageTag::Synthesize => "synthesize",
            StageTag::Align => "align",
            StageTag::Judge => "judge",
        }
    }
}

impl std::fmt::Display for StageTag {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for StageTag {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        StageTag::ALL
            .into_iter()
            .find(|t| t.name() == s)
            .ok_or_else(|| Error::input(format!("unknown stage tag: {s:?}")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompletionRequest {
    pub stage_tag: StageTag,
    pub system_prompt: String,
    pub user_prompt: String,
    pub max_tokens: u32,
    pub temperature: f64,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompletionResult {
    pub text: String,
    pub backend_id: String,
    pub latency_ms: u64,
    pub attempt_count: u32,
}

/// A completion provider. Implementations must be safe to call concurrently.
pub trait Backend: Send + Sync {
    fn complete(&self, request: &CompletionRequest) -> Result<CompletionResult>;

    fn id(&self) -> &str;
}

/// A default backend plus optional per-stage overrides, modelling one
/// specialized model per stage.
#[derive(Clone)]
pub struct BackendSet {
    default: Arc<dyn Backend>,
    per_stage: BTreeMap<StageTag, Arc<dyn Backend>>,
}

impl BackendSet {
    pub fn uniform(backend: Arc<dyn Backend>) -> Self {
        Self {
            default: backend,
            per_stage: BTreeMap::new(),
        }
    }

    pub fn with_stage(mut self, stage: StageTag, backend: Arc<dyn Backend>) -> Self {
        self.per_stage.insert(stage, backend);
        self
    }

    fn backend_for(&self, stage: StageTag) -> &Arc<dyn Backend> {
        self.per_stage.get(&stage).unwrap_or(&self.default)
    }
}

/// Which backend family a request is routed to. Ablation switches route
/// individual stages to the base family.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Route {
    Trained,
    Base,
}

/// Dispatches completion requests by stage tag with a bounded number of
/// in-flight calls.
pub struct Gateway {
    trained: BackendSet,
    base: BackendSet,
    limiter: Semaphore,
}

impl Gateway {
    pub const DEFAULT_MAX_IN_FLIGHT: usize = 4;

    pub fn new(trained: BackendSet, base: BackendSet, max_in_flight: usize) -> Self {
        Self {
            trained,
            base,
            limiter: Semaphore::new(max_in_flight.max(1)),
        }
    }

    /// Gateway over a single backend used for both routes.
    pub fn uniform(backend: Arc<dyn Backend>) -> Self {
        let set = BackendSet::uniform(backend);
        Self::new(set.clone(), set, Self::DEFAULT_MAX_IN_FLIGHT)
    }

    pub fn complete(&self, request: &CompletionRequest, route: Route) -> Result<CompletionResult> {
        let set = match route {
            Route::Trained => &self.trained,
            Route::Base => &self.base,
        };
        let backend = set.backend_for(request.stage_tag);
        let _permit = self.limiter.acquire();
        backend.complete(request)
    }
}

/// Counting semaphore bounding concurrent completions.
struct Semaphore {
    permits: Mutex<usize>,
    available: Condvar,
}

struct Permit<'a>(&'a Semaphore);

impl Semaphore {
    fn new(count: usize) -> Self {
        Self {
            permits: Mutex::new(count),
            available: Condvar::new(),
        }
    }

    fn acquire(&self) -> Permit<'_> {
        let mut permits = self.permits.lock().unwrap();
        while *permits == 0 {
            permits = self.available.wait(permits).unwrap();
        }
        *permits -= 1;
        Permit(self)
    }
}

impl Drop for Permit<'_> {
    fn drop(&mut self) {
        let mut permits = self.0.permits.lock().unwrap();
        *permits += 1;
        self.0.available.notify_one();
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    struct Echo(String);

    impl Backend for Echo {
        fn complete(&self, request: &CompletionRequest) -> Result<CompletionResult> {
            Ok(CompletionResult {
                text: format!("{}:{}", self.0, request.user_prompt),
                backend_id: self.0.clone(),
                latency_ms: 0,
                attempt_count: 1,
            })
        }

        fn id(&self) -> &str {
            &self.0
        }
    }

    fn req(stage: StageTag, prompt: &str) -> CompletionRequest {
        CompletionRequest {
            stage_tag: stage,
            system_prompt: String::new(),
            user_prompt: prompt.to_string(),
            max_tokens: 64,
            temperature: 0.0,
            seed: 0,
        }
    }

    #[test]
    fn routes_by_stage_tag() {
        let set = BackendSet::uniform(Arc::new(Echo("default".into())))
            .with_stage(StageTag::Local, Arc::new(Echo("local-model".into())));
        let gw = Gateway::new(set.clone(), set, 2);
        let r = gw.complete(&req(StageTag::Local, "p"), Route::Trained).unwrap();
        assert_eq!(r.backend_id, "local-model");
        let r = gw.complete(&req(StageTag::Extract, "p"), Route::Trained).unwrap();
        assert_eq!(r.backend_id, "default");
    }

    #[test]
    fn base_route_uses_base_set() {
        let trained = BackendSet::uniform(Arc::new(Echo("trained".into())));
        let base = BackendSet::uniform(Arc::new(Echo("base".into())));
        let gw = Gateway::new(trained, base, 2);
        assert_eq!(
            gw.complete(&req(StageTag::Align, "p"), Route::Base).unwrap().backend_id,
            "base"
        );
    }

    #[test]
    fn prompt_passes_through_byte_exact() {
        let gw = Gateway::uniform(Arc::new(Echo("e".into())));
        let prompt = "exact \u{00e9} bytes\n\twith whitespace  ";
        let r = gw.complete(&req(StageTag::Judge, prompt), Route::Trained).unwrap();
        assert_eq!(r.text, format!("e:{prompt}"));
    }

    #[test]
    fn semaphore_bounds_concurrency() {
        use std::sync::atomic::{AtomicUsize, Ordering};

        struct Counting {
            active: AtomicUsize,
            peak: AtomicUsize,
        }

        impl Backend for Counting {
            fn complete(&self, _request: &CompletionRequest) -> Result<CompletionResult> {
                let now = self.active.fetch_add(1, Ordering::SeqCst) + 1;
                self.peak.fetch_max(now, Ordering::SeqCst);
                std::thread::sleep(std::time::Duration::from_millis(5));
                self.active.fetch_sub(1, Ordering::SeqCst);
                Ok(CompletionResult {
                    text: String::new(),
                    backend_id: "counting".into(),
                    latency_ms: 5,
                    attempt_count: 1,
                })
            }

            fn id(&self) -> &str {
                "counting"
            }
        }

        let backend = Arc::new(Counting {
            active: AtomicUsize::new(0),
            peak: AtomicUsize::new(0),
        });
        let set = BackendSet::uniform(backend.clone());
        let gw = Arc::new(Gateway::new(set.clone(), set, 2));
        std::thread::scope(|scope| {
            for _ in 0..8 {
                let gw = gw.clone();
                scope.spawn(move || {
                    gw.complete(&req(StageTag::Local, "x"), Route::Trained).unwrap();
                });
            }
        });
        assert!(backend.peak.load(std::sync::atomic::Ordering::SeqCst) <= 2);
    }
}
