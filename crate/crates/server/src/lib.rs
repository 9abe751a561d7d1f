//! HTTP service over a completed build.
//!
//! Build data is loaded once and never modified. The only mutable state is
//! the annotation log, which lives outside the build directory so that
//! rebuilding keeps talk pages and errata.

pub mod annotations;

use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex};
use std::time::{SystemTime, UNIX_EPOCH};

use axum::body::Bytes;
use axum::extract::{Path as UrlPath, Query, State};
use axum::http::{header, StatusCode};
use axum::response::{Html, IntoResponse, Response};
use axum::routing::get;
use axum::{Json, Router};
use formulary_core::biblio::format_citation;
use formulary_core::pages::{math_block, Symbol};
use formulary_core::repo::{load_build, LoadedBuild, RepoError, PAGES_DIR};
use formulary_core::search::parse_query;
use formulary_core::translate::{export_named, escape_xml, TranslateError};
use formulary_core::{FormulaRecord, MathNode};
use serde::{Deserialize, Serialize};
use thiserror::Error;
use tower_http::services::{ServeDir, ServeFile};

pub use annotations::{Annotation, AnnotationKind, AnnotationLog};

pub const ANNOTATIONS_FILE: &str = "annotations.log";
pub const DEFAULT_RESULTS: usize = 10;

#[derive(Debug, Error)]
pub enum ServerError {
    #[error("cannot load build: {0}")]
    Build(#[from] RepoError),
    #[error("annotation log {}: {source}", path.display())]
    Log { path: PathBuf, source: std::io::Error },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone)]
pub struct Config {
    pub build_dir: PathBuf,
    /// Defaults to `annotations.log` beside the build directory.
    pub annotations: Option<PathBuf>,
    /// Directory holding the browser UI; defaults to `<build_dir>/ui`.
    pub ui_dir: Option<PathBuf>,
}

impl Config {
    pub fn new(build_dir: impl Into<PathBuf>) -> Config {
        Config {
            build_dir: build_dir.into(),
            annotations: None,
            ui_dir: None,
        }
    }

    pub fn annotations_path(&self) -> PathBuf {
        self.annotations.clone().unwrap_or_else(|| {
            let parent = match self.build_dir.parent() {
                Some(p) if !p.as_os_str().is_empty() => p,
                _ => Path::new("."),
            };
            parent.join(ANNOTATIONS_FILE)
        })
    }

    fn ui_path(&self) -> PathBuf {
        self.ui_dir.clone().unwrap_or_else(|| self.build_dir.join("ui"))
    }
}

pub struct AppState {
    pub build: LoadedBuild,
    log: Mutex<AnnotationLog>,
}

impl AppState {
    pub fn load(config: &Config) -> Result<AppState, ServerError> {
        let build = load_build(&config.build_dir)?;
        let path = config.annotations_path();
        let log = AnnotationLog::open(&path).map_err(|source| ServerError::Log { path, source })?;
        Ok(AppState {
            build,
            log: Mutex::new(log),
        })
    }

    fn record(&self, id: &str) -> Result<&FormulaRecord, ApiError> {
        self.build
            .repo
            .record(id)
            .ok_or_else(|| ApiError::not_found(format!("no formula with id {id:?}")))
    }

    fn annotations(&self, id: &str) -> Vec<Annotation> {
        self.log.lock().expect("annotation log lock").for_formula(id)
    }
}

/// Error document: `{"error": message, "status": code}`.
#[derive(Debug)]
struct ApiError {
    status: StatusCode,
    message: String,
}

impl ApiError {
    fn new(status: StatusCode, message: impl Into<String>) -> Self {
        ApiError {
            status,
            message: message.into(),
        }
    }

    fn not_found(message: impl Into<String>) -> Self {
        ApiError::new(StatusCode::NOT_FOUND, message)
    }

    fn bad_request(message: impl Into<String>) -> Self {
        ApiError::new(StatusCode::BAD_REQUEST, message)
    }

    fn internal(message: impl Into<String>) -> Self {
        ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, message)
    }
}

impl From<TranslateError> for ApiError {
    fn from(e: TranslateError) -> Self {
        let status = match e {
            TranslateError::UnknownFormat(_) => StatusCode::BAD_REQUEST,
            TranslateError::MissingCasTemplate { .. } | TranslateError::UntranslatableConstruct(_) => {
                StatusCode::UNPROCESSABLE_ENTITY
            }
            TranslateError::Expand(_) => StatusCode::INTERNAL_SERVER_ERROR,
        };
        ApiError::new(status, e.to_string())
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let body = serde_json::json!({ "error": self.message, "status": self.status.as_u16() });
        (self.status, Json(body)).into_response()
    }
}

type ApiResult<T> = Result<T, ApiError>;

#[derive(Serialize)]
struct Citation {
    key: String,
    text: String,
}

#[derive(Serialize)]
struct MathItem {
    semantic_tex: String,
    mathml: String,
}

#[derive(Serialize)]
struct FormulaDocument {
    id: String,
    semantic_tex: String,
    mathml: String,
    citations: Vec<Citation>,
    proofs: Vec<String>,
    notes: Vec<String>,
    links: Vec<String>,
    constraints: Vec<MathItem>,
    substitutions: Vec<MathItem>,
    symbols: Vec<Symbol>,
    annotations: Vec<Annotation>,
}

fn formula_document(state: &AppState, r: &FormulaRecord) -> ApiResult<FormulaDocument> {
    let table = &state.build.repo.table;
    let math = |node: &MathNode| -> ApiResult<MathItem> {
        Ok(MathItem {
            semantic_tex: formulary_core::math::canonical(node),
            mathml: math_block(node, table)?,
        })
    };
    let citations = r
        .cites
        .iter()
        .map(|key| Citation {
            key: key.clone(),
            text: state.build.repo.bib.resolve(key).map(format_citation).unwrap_or_default(),
        })
        .collect();
    Ok(FormulaDocument {
        id: r.id.clone(),
        semantic_tex: r.canonical_tex.clone(),
        mathml: math_block(&r.ast, table)?,
        citations,
        proofs: r.proofs.clone(),
        notes: r.notes.clone(),
        links: r.links.clone(),
        constraints: r.constraints.iter().map(math).collect::<ApiResult<_>>()?,
        substitutions: r.substitutions.iter().map(math).collect::<ApiResult<_>>()?,
        symbols: r.symbols.clone(),
        annotations: state.annotations(&r.id),
    })
}

async fn get_formula(
    State(state): State<Arc<AppState>>,
    UrlPath(id): UrlPath<String>,
) -> ApiResult<Json<FormulaDocument>> {
    let record = state.record(&id)?;
    Ok(Json(formula_document(&state, record)?))
}

#[derive(Deserialize)]
struct SearchParams {
    #[serde(default)]
    q: String,
    k: Option<usize>,
}

#[derive(Serialize)]
struct SearchHit {
    id: String,
    score: f64,
    semantic_tex: String,
}

#[derive(Serialize)]
struct SearchResults {
    query: String,
    results: Vec<SearchHit>,
}

async fn search(
    State(state): State<Arc<AppState>>,
    Query(params): Query<SearchParams>,
) -> ApiResult<Json<SearchResults>> {
    let query = parse_query(&params.q, &state.build.repo.table)
        .map_err(|e| ApiError::bad_request(e.to_string()))?;
    let hits = state.build.index.execute(&query, params.k.unwrap_or(DEFAULT_RESULTS));
    let results = hits
        .into_iter()
        .map(|(id, score)| {
            let semantic_tex = state.build.repo.record(&id).map(|r| r.canonical_tex.clone()).unwrap_or_default();
            SearchHit { id, score, semantic_tex }
        })
        .collect();
    Ok(Json(SearchResults {
        query: params.q,
        results,
    }))
}

#[derive(Deserialize)]
struct ExportParams {
    format: Option<String>,
}

async fn export(
    State(state): State<Arc<AppState>>,
    UrlPath(id): UrlPath<String>,
    Query(params): Query<ExportParams>,
) -> ApiResult<Response> {
    let record = state.record(&id)?;
    let format = params
        .format
        .ok_or_else(|| ApiError::bad_request("missing format parameter"))?;
    let text = export_named(record, &format, &state.build.repo.table)?;
    Ok(([(header::CONTENT_TYPE, "text/plain; charset=utf-8")], text).into_response())
}

#[derive(Serialize)]
struct SymbolDocument {
    name: String,
    url: String,
    category: String,
    ids: Vec<String>,
}

async fn symbol(
    State(state): State<Arc<AppState>>,
    UrlPath(name): UrlPath<String>,
) -> ApiResult<Json<SymbolDocument>> {
    let repo = &state.build.repo;
    let entry = repo
        .table
        .lookup(&name)
        .ok_or_else(|| ApiError::not_found(format!("no macro named {name:?}")))?;
    let ids = repo
        .records
        .iter()
        .filter(|r| r.symbols.iter().any(|s| s.name == name))
        .map(|r| r.id.clone())
        .collect();
    Ok(Json(SymbolDocument {
        name: entry.name.clone(),
        url: entry.url.clone(),
        category: entry.category.as_str().to_string(),
        ids,
    }))
}

#[derive(Serialize)]
struct BibDocument {
    key: String,
    kind: String,
    fields: std::collections::BTreeMap<String, String>,
    citation: String,
}

async fn bib(State(state): State<Arc<AppState>>, UrlPath(key): UrlPath<String>) -> ApiResult<Json<BibDocument>> {
    let entry = state
        .build
        .repo
        .bib
        .resolve(&key)
        .map_err(|_| ApiError::not_found(format!("no bibliography entry {key:?}")))?;
    Ok(Json(BibDocument {
        key: entry.key.clone(),
        kind: entry.kind.clone(),
        fields: entry.fields.clone(),
        citation: format_citation(entry),
    }))
}

async fn list_annotations(
    State(state): State<Arc<AppState>>,
    UrlPath(id): UrlPath<String>,
) -> ApiResult<Json<Vec<Annotation>>> {
    state.record(&id)?;
    Ok(Json(state.annotations(&id)))
}

#[derive(Deserialize)]
struct NewAnnotation {
    kind: String,
    #[serde(default)]
    author: String,
    #[serde(default)]
    body: String,
}

async fn post_annotation(
    State(state): State<Arc<AppState>>,
    UrlPath(id): UrlPath<String>,
    payload: Bytes,
) -> ApiResult<(StatusCode, Json<Annotation>)> {
    state.record(&id)?;
    let new: NewAnnotation = serde_json::from_slice(&payload)
        .map_err(|e| ApiError::bad_request(format!("invalid annotation document: {e}")))?;
    let kind = new.kind.parse::<AnnotationKind>().map_err(ApiError::bad_request)?;
    if new.body.trim().is_empty() {
        return Err(ApiError::bad_request("annotation body is empty"));
    }
    let author = if new.author.trim().is_empty() {
        "anonymous".to_string()
    } else {
        new.author
    };

    let writer = Arc::clone(&state);
    let stored = tokio::task::spawn_blocking(move || {
        let mut log = writer.log.lock().expect("annotation log lock");
        // Timestamp taken under the lock so log order and time order agree.
        let timestamp = SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map_or(0, |d| d.as_secs());
        let entry = Annotation {
            id,
            kind,
            author,
            body: new.body,
            timestamp,
        };
        log.append(entry.clone()).map(|()| entry)
    })
    .await
    .map_err(|e| ApiError::internal(e.to_string()))?
    .map_err(|e| ApiError::internal(format!("cannot write annotation: {e}")))?;
    Ok((StatusCode::CREATED, Json(stored)))
}

async fn id_index(State(state): State<Arc<AppState>>) -> Html<String> {
    let mut page = String::from(
        "<!DOCTYPE html>\n<html>\n<head>\n<meta charset=\"utf-8\">\n<title>Formulae</title>\n</head>\n<body>\n<ul>\n",
    );
    for row in &state.build.manifest {
        let id = escape_xml(&row.id);
        page.push_str(&format!("<li><a href=\"/{PAGES_DIR}/{id}.html\">{id}</a></li>\n"));
    }
    page.push_str("</ul>\n</body>\n</html>\n");
    Html(page)
}

async fn api_not_found() -> ApiError {
    ApiError::not_found("no such endpoint")
}

pub fn router(state: Arc<AppState>, config: &Config) -> Router {
    let api = Router::new()
        .route("/formula/{id}", get(get_formula))
        .route(
            "/formula/{id}/annotations",
            get(list_annotations).post(post_annotation),
        )
        .route("/search", get(search))
        .route("/export/{id}", get(export))
        .route("/symbol/{name}", get(symbol))
        .route("/bib/{key}", get(bib))
        .fallback(api_not_found);

    let router = Router::new()
        .nest("/api", api)
        .nest_service(
            &format!("/{PAGES_DIR}"),
            ServeDir::new(config.build_dir.join(PAGES_DIR)),
        );
    let ui = config.ui_path();
    let entry = ui.join("index.html");
    let router = if entry.is_file() {
        router
            .route_service("/", ServeFile::new(entry))
            .fallback_service(ServeDir::new(ui))
    } else {
        router.route("/", get(id_index))
    };
    router.with_state(state)
}

/// Loads the build and binds `addr`; returns the bound address and the
/// server future.
pub async fn bind(
    config: Config,
    addr: SocketAddr,
) -> Result<(SocketAddr, impl std::future::Future<Output = Result<(), ServerError>>), ServerError> {
    let state = Arc::new(AppState::load(&config)?);
    let listener = tokio::net::TcpListener::bind(addr).await?;
    let local = listener.local_addr()?;
    let app = router(state, &config);
    Ok((local, async move {
        axum::serve(listener, app).await?;
        Ok(())
    }))
}
