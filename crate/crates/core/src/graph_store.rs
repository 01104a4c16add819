//! Page / category / hyperlink corpus.
//!
//! A [`KnowledgeBase`] is built from four tab-separated files (see
//! [`load_knowledge_base`]) or from a binary snapshot. Redirect pages are
//! resolved at build time, so every stored edge points at a real article or
//! category. After construction the structure is immutable.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet, VecDeque};
use std::fmt;
use std::fs::File;
use std::io::{self, BufRead, BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use thiserror::Error;

/// Longest redirect chain that is still followed. Longer chains are
/// reported as cycles.
pub const MAX_REDIRECT_DEPTH: usize = 16;

pub const SNAPSHOT_MAGIC: &[u8; 4] = b"WKRL";
pub const SNAPSHOT_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PageId(pub u32);

impl serde::Serialize for PageId {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_u32(self.0)
    }
}

impl fmt::Display for PageId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PageKind {
    Article,
    Category,
    Redirect,
}

impl PageKind {
    const ALL: [PageKind; 3] = [PageKind::Article, PageKind::Category, PageKind::Redirect];

    pub fn from_code(code: &str) -> Option<Self> {
        match code {
            "A" => Some(PageKind::Article),
            "C" => Some(PageKind::Category),
            "R" => Some(PageKind::Redirect),
            _ => None,
        }
    }

    pub fn code(self) -> char {
        match self {
            PageKind::Article => 'A',
            PageKind::Category => 'C',
            PageKind::Redirect => 'R',
        }
    }

    fn index(self) -> usize {
        match self {
            PageKind::Article => 0,
            PageKind::Category => 1,
            PageKind::Redirect => 2,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Page {
    pub id: PageId,
    pub title: String,
    pub kind: PageKind,
}

impl Page {
    pub fn new(id: u32, kind: PageKind, title: impl Into<String>) -> Self {
        Page {
            id: PageId(id),
            title: title.into(),
            kind,
        }
    }
}

#[derive(Debug, Error)]
pub enum StoreError {
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: io::Error },
    #[error("{}:{line}: {message}", path.display())]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },
    #[error("redirect cycle: {}", join_ids(.0))]
    RedirectCycle(Vec<PageId>),
    #[error("{context} refers to unknown page id {id}")]
    UnknownPage { context: String, id: PageId },
    #[error("invalid knowledge base: {0}")]
    Invalid(String),
    #[error("root category {0:?} not found")]
    RootNotFound(String),
    #[error("root {0:?} is not a category")]
    RootNotCategory(String),
    #[error("not a snapshot file (bad magic bytes)")]
    BadMagic,
    #[error(
        "snapshot version mismatch: file has version {found}, this build reads version {expected}"
    )]
    VersionMismatch { found: u32, expected: u32 },
    #[error("snapshot truncated")]
    Truncated,
    #[error("snapshot corrupt: {0}")]
    Corrupt(String),
}

fn join_ids(ids: &[PageId]) -> String {
    ids.iter()
        .map(|id| id.to_string())
        .collect::<Vec<_>>()
        .join(" -> ")
}

/// Summary counts of a loaded corpus.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct KbStats {
    pub articles: usize,
    pub categories: usize,
    pub redirects: usize,
    pub cat_edges: usize,
    pub link_edges: usize,
}

impl fmt::Display for KbStats {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} articles, {} categories, {} redirects, {} category links, {} page links",
            self.articles, self.categories, self.redirects, self.cat_edges, self.link_edges
        )
    }
}

/// The corpus: pages, category membership and article hyperlinks.
///
/// Equality is structural and does not depend on the order rows were read.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct KnowledgeBase {
    pages: BTreeMap<PageId, Page>,
    titles: [HashMap<String, PageId>; 3],
    /// Redirect page -> final (non-redirect) target.
    redirects: BTreeMap<PageId, PageId>,
    /// child page -> parent category
    cat_edges: BTreeSet<(PageId, PageId)>,
    /// source article -> destination article
    link_edges: BTreeSet<(PageId, PageId)>,
    root_category: Option<PageId>,
    parents: HashMap<PageId, Vec<PageId>>,
    children: HashMap<PageId, Vec<PageId>>,
    out_links: HashMap<PageId, Vec<PageId>>,
    in_links: HashMap<PageId, Vec<PageId>>,
}

impl KnowledgeBase {
    /// Builds a knowledge base from raw rows.
    ///
    /// Redirect targets may themselves be redirects; chains are followed up
    /// to [`MAX_REDIRECT_DEPTH`] hops. Edge endpoints that name a redirect
    /// are rewritten to the final target, then deduplicated.
    pub fn from_parts(
        pages: Vec<Page>,
        redirects: Vec<(PageId, PageId)>,
        cat_edges: Vec<(PageId, PageId)>,
        link_edges: Vec<(PageId, PageId)>,
    ) -> Result<Self, StoreError> {
        let mut page_map = BTreeMap::new();
        let mut titles: [HashMap<String, PageId>; 3] = Default::default();
        for page in pages {
            if page.id.0 == 0 {
                return Err(StoreError::Invalid("page id 0 is not allowed".into()));
            }
            let slot = &mut titles[page.kind.index()];
            if let Some(other) = slot.insert(page.title.clone(), page.id) {
                return Err(StoreError::Invalid(format!(
                    "title {:?} used by pages {} and {}",
                    page.title, other, page.id
                )));
            }
            let id = page.id;
            if page_map.insert(id, page).is_some() {
                return Err(StoreError::Invalid(format!("duplicate page id {id}")));
            }
        }

        let resolved = resolve_redirects(&page_map, &redirects)?;
        let follow = |id: PageId| resolved.get(&id).copied().unwrap_or(id);
        let kind_of = |context: &str, id: PageId| {
            page_map
                .get(&id)
                .map(|p| p.kind)
                .ok_or_else(|| StoreError::UnknownPage {
                    context: context.to_string(),
                    id,
                })
        };

        let mut cats = BTreeSet::new();
        for (child, parent) in cat_edges {
            kind_of("category link", child)?;
            kind_of("category link", parent)?;
            let (child, parent) = (follow(child), follow(parent));
            if kind_of("category link", parent)? != PageKind::Category {
                return Err(StoreError::Invalid(format!(
                    "category link {child} -> {parent}: parent is not a category"
                )));
            }
            cats.insert((child, parent));
        }

        let mut links = BTreeSet::new();
        for (src, dst) in link_edges {
            kind_of("page link", src)?;
            kind_of("page link", dst)?;
            let (src, dst) = (follow(src), follow(dst));
            for end in [src, dst] {
                if kind_of("page link", end)? != PageKind::Article {
                    return Err(StoreError::Invalid(format!(
                        "page link {src} -> {dst}: endpoint {end} is not an article"
                    )));
                }
            }
            links.insert((src, dst));
        }

        Ok(Self::assemble(
            page_map, titles, resolved, cats, links, None,
        ))
    }

    fn assemble(
        pages: BTreeMap<PageId, Page>,
        titles: [HashMap<String, PageId>; 3],
        redirects: BTreeMap<PageId, PageId>,
        cat_edges: BTreeSet<(PageId, PageId)>,
        link_edges: BTreeSet<(PageId, PageId)>,
        root_category: Option<PageId>,
    ) -> Self {
        let mut parents: HashMap<PageId, Vec<PageId>> = HashMap::new();
        let mut children: HashMap<PageId, Vec<PageId>> = HashMap::new();
        // BTreeSet iteration is sorted, so every adjacency list comes out sorted.
        for &(c, p) in &cat_edges {
            parents.entry(c).or_default().push(p);
        }
        let mut by_parent: Vec<_> = cat_edges.iter().map(|&(c, p)| (p, c)).collect();
        by_parent.sort_unstable();
        for (p, c) in by_parent {
            children.entry(p).or_default().push(c);
        }
        let mut out_links: HashMap<PageId, Vec<PageId>> = HashMap::new();
        let mut in_links: HashMap<PageId, Vec<PageId>> = HashMap::new();
        for &(s, d) in &link_edges {
            out_links.entry(s).or_default().push(d);
        }
        let mut by_dst: Vec<_> = link_edges.iter().map(|&(s, d)| (d, s)).collect();
        by_dst.sort_unstable();
        for (d, s) in by_dst {
            in_links.entry(d).or_default().push(s);
        }
        KnowledgeBase {
            pages,
            titles,
            redirects,
            cat_edges,
            link_edges,
            root_category,
            parents,
            children,
            out_links,
            in_links,
        }
    }

    pub fn stats(&self) -> KbStats {
        let count = |k: PageKind| self.titles[k.index()].len();
        KbStats {
            articles: count(PageKind::Article),
            categories: count(PageKind::Category),
            redirects: count(PageKind::Redirect),
            cat_edges: self.cat_edges.len(),
            link_edges: self.link_edges.len(),
        }
    }

    pub fn page(&self, id: PageId) -> Option<&Page> {
        self.pages.get(&id)
    }

    pub fn title(&self, id: PageId) -> Option<&str> {
        self.pages.get(&id).map(|p| p.title.as_str())
    }

    pub fn kind(&self, id: PageId) -> Option<PageKind> {
        self.pages.get(&id).map(|p| p.kind)
    }

    /// All pages in ascending id order.
    pub fn pages(&self) -> impl Iterator<Item = &Page> + '_ {
        self.pages.values()
    }

    pub fn len(&self) -> usize {
        self.pages.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pages.is_empty()
    }

    /// Category ids in ascending order.
    pub fn categories(&self) -> impl Iterator<Item = PageId> + '_ {
        self.pages_of_kind(PageKind::Category)
    }

    pub fn articles(&self) -> impl Iterator<Item = PageId> + '_ {
        self.pages_of_kind(PageKind::Article)
    }

    fn pages_of_kind(&self, kind: PageKind) -> impl Iterator<Item = PageId> + '_ {
        self.pages
            .values()
            .filter(move |p| p.kind == kind)
            .map(|p| p.id)
    }

    pub fn redirects(&self) -> &BTreeMap<PageId, PageId> {
        &self.redirects
    }

    pub fn cat_edges(&self) -> &BTreeSet<(PageId, PageId)> {
        &self.cat_edges
    }

    pub fn link_edges(&self) -> &BTreeSet<(PageId, PageId)> {
        &self.link_edges
    }

    pub fn root_category(&self) -> Option<PageId> {
        self.root_category
    }

    /// Categories the page belongs to, ascending.
    pub fn parents(&self, id: PageId) -> &[PageId] {
        self.parents.get(&id).map_or(&[], Vec::as_slice)
    }

    /// Direct members (subcategories and articles) of a category, ascending.
    pub fn children(&self, id: PageId) -> &[PageId] {
        self.children.get(&id).map_or(&[], Vec::as_slice)
    }

    pub fn out_links(&self, id: PageId) -> &[PageId] {
        self.out_links.get(&id).map_or(&[], Vec::as_slice)
    }

    pub fn in_links(&self, id: PageId) -> &[PageId] {
        self.in_links.get(&id).map_or(&[], Vec::as_slice)
    }

    pub fn lookup(&self, kind: PageKind, title: &str) -> Option<PageId> {
        self.titles[kind.index()].get(title).copied()
    }

    pub fn category_by_title(&self, title: &str) -> Option<PageId> {
        self.lookup(PageKind::Category, title)
            .or_else(|| self.lookup(PageKind::Category, &capitalize(title)?))
    }

    /// Maps a free-text term to a page.
    ///
    /// Tries an exact title match first, then the same term with its first
    /// character uppercased. Articles win over redirects, redirects over
    /// categories; redirects are followed to their target.
    pub fn resolve_title(&self, term: &str) -> Option<PageId> {
        self.resolve_exact(term)
            .or_else(|| self.resolve_exact(&capitalize(term)?))
    }

    fn resolve_exact(&self, title: &str) -> Option<PageId> {
        PageKind::ALL.iter().find_map(|&kind| {
            self.lookup(kind, title)
                .map(|id| self.redirects.get(&id).copied().unwrap_or(id))
        })
    }

    /// Keeps only the part of the taxonomy below `root_title`.
    ///
    /// Surviving categories are those reachable from the root by walking
    /// category membership downward. Articles survive when they belong to
    /// at least one surviving category; redirects survive when their target
    /// does.
    pub fn restrict_to_root(&self, root_title: &str) -> Result<KnowledgeBase, StoreError> {
        let root = match self.category_by_title(root_title) {
            Some(id) => id,
            None => {
                return Err(match self.resolve_title(root_title) {
                    Some(_) => StoreError::RootNotCategory(root_title.to_string()),
                    None => StoreError::RootNotFound(root_title.to_string()),
                })
            }
        };

        let mut keep: HashSet<PageId> = HashSet::new();
        keep.insert(root);
        let mut queue = VecDeque::from([root]);
        while let Some(cat) = queue.pop_front() {
            for &child in self.children(cat) {
                match self.kind(child) {
                    Some(PageKind::Category) => {
                        if keep.insert(child) {
                            queue.push_back(child);
                        }
                    }
                    Some(PageKind::Article) => {
                        keep.insert(child);
                    }
                    _ => {}
                }
            }
        }
        let redirects: BTreeMap<_, _> = self
            .redirects
            .iter()
            .filter(|(_, t)| keep.contains(t))
            .map(|(&s, &t)| (s, t))
            .collect();
        keep.extend(redirects.keys().copied());

        let pages: BTreeMap<_, _> = self
            .pages
            .iter()
            .filter(|(id, _)| keep.contains(id))
            .map(|(&id, p)| (id, p.clone()))
            .collect();
        let mut titles: [HashMap<String, PageId>; 3] = Default::default();
        for p in pages.values() {
            titles[p.kind.index()].insert(p.title.clone(), p.id);
        }
        let both = |&&(a, b): &&(PageId, PageId)| keep.contains(&a) && keep.contains(&b);
        let cat_edges = self.cat_edges.iter().filter(both).copied().collect();
        let link_edges = self.link_edges.iter().filter(both).copied().collect();
        Ok(Self::assemble(
            pages,
            titles,
            redirects,
            cat_edges,
            link_edges,
            Some(root),
        ))
    }

    /// Writes a binary snapshot.
    pub fn save_snapshot(&self, path: &Path) -> Result<(), StoreError> {
        let io_err = |source| StoreError::Io {
            path: path.to_path_buf(),
            source,
        };
        let file = File::create(path).map_err(io_err)?;
        let mut w = BufWriter::new(file);
        self.write_snapshot(&mut w).map_err(io_err)?;
        w.flush().map_err(io_err)
    }

    fn write_snapshot(&self, w: &mut impl Write) -> io::Result<()> {
        let u32le = |w: &mut dyn Write, v: u32| w.write_all(&v.to_le_bytes());
        let len = |n: usize| {
            u32::try_from(n)
                .map_err(|_| io::Error::new(io::ErrorKind::InvalidInput, "too many items"))
        };
        w.write_all(SNAPSHOT_MAGIC)?;
        u32le(w, SNAPSHOT_VERSION)?;
        u32le(w, len(self.pages.len())?)?;
        for p in self.pages.values() {
            u32le(w, p.id.0)?;
            w.write_all(&[p.kind.index() as u8])?;
            u32le(w, len(p.title.len())?)?;
            w.write_all(p.title.as_bytes())?;
        }
        let pairs =
            |w: &mut dyn Write, n: usize, it: &mut dyn Iterator<Item = (PageId, PageId)>| {
                u32le(w, len(n)?)?;
                for (a, b) in it {
                    u32le(w, a.0)?;
                    u32le(w, b.0)?;
                }
                Ok::<_, io::Error>(())
            };
        pairs(
            w,
            self.redirects.len(),
            &mut self.redirects.iter().map(|(&a, &b)| (a, b)),
        )?;
        pairs(w, self.cat_edges.len(), &mut self.cat_edges.iter().copied())?;
        pairs(
            w,
            self.link_edges.len(),
            &mut self.link_edges.iter().copied(),
        )?;
        match self.root_category {
            Some(root) => {
                w.write_all(&[1])?;
                u32le(w, root.0)
            }
            None => w.write_all(&[0]),
        }
    }

    pub fn load_snapshot(path: &Path) -> Result<KnowledgeBase, StoreError> {
        let mut bytes = Vec::new();
        File::open(path)
            .and_then(|mut f| f.read_to_end(&mut bytes))
            .map_err(|source| StoreError::Io {
                path: path.to_path_buf(),
                source,
            })?;
        Self::from_snapshot_bytes(&bytes)
    }

    pub fn from_snapshot_bytes(bytes: &[u8]) -> Result<KnowledgeBase, StoreError> {
        let mut r = ByteReader { bytes, pos: 0 };
        if r.take(4)? != SNAPSHOT_MAGIC {
            return Err(StoreError::BadMagic);
        }
        let version = r.u32()?;
        if version != SNAPSHOT_VERSION {
            return Err(StoreError::VersionMismatch {
                found: version,
                expected: SNAPSHOT_VERSION,
            });
        }
        let n_pages = r.u32()? as usize;
        let mut pages = Vec::with_capacity(n_pages.min(bytes.len()));
        for _ in 0..n_pages {
            let id = r.u32()?;
            let kind = match r.take(1)?[0] {
                0 => PageKind::Article,
                1 => PageKind::Category,
                2 => PageKind::Redirect,
                other => return Err(StoreError::Corrupt(format!("unknown page kind {other}"))),
            };
            let title_len = r.u32()? as usize;
            let title = std::str::from_utf8(r.take(title_len)?)
                .map_err(|e| StoreError::Corrupt(format!("title of page {id}: {e}")))?;
            pages.push(Page::new(id, kind, title));
        }
        let redirects = r.pairs()?;
        let cat_edges = r.pairs()?;
        let link_edges = r.pairs()?;
        let root = match r.take(1)?[0] {
            0 => None,
            1 => Some(PageId(r.u32()?)),
            other => return Err(StoreError::Corrupt(format!("bad root flag {other}"))),
        };
        if r.pos != bytes.len() {
            return Err(StoreError::Corrupt(format!(
                "{} trailing bytes",
                bytes.len() - r.pos
            )));
        }
        let mut kb = KnowledgeBase::from_parts(pages, redirects, cat_edges, link_edges)?;
        if let Some(root) = root {
            if kb.kind(root) != Some(PageKind::Category) {
                return Err(StoreError::Corrupt(format!(
                    "root {root} is not a category"
                )));
            }
        }
        kb.root_category = root;
        Ok(kb)
    }
}

struct ByteReader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> ByteReader<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8], StoreError> {
        let end = self.pos.checked_add(n).ok_or(StoreError::Truncated)?;
        let slice = self.bytes.get(self.pos..end).ok_or(StoreError::Truncated)?;
        self.pos = end;
        Ok(slice)
    }

    fn u32(&mut self) -> Result<u32, StoreError> {
        let b = self.take(4)?;
        Ok(u32::from_le_bytes([b[0], b[1], b[2], b[3]]))
    }

    fn pairs(&mut self) -> Result<Vec<(PageId, PageId)>, StoreError> {
        let n = self.u32()? as usize;
        let mut out = Vec::with_capacity(n.min(self.bytes.len() / 8));
        for _ in 0..n {
            out.push((PageId(self.u32()?), PageId(self.u32()?)));
        }
        Ok(out)
    }
}

fn capitalize(s: &str) -> Option<String> {
    let mut chars = s.chars();
    let first = chars.next()?;
    let upper: String = first.to_uppercase().chain(chars).collect();
    (upper != s).then_some(upper)
}

fn resolve_redirects(
    pages: &BTreeMap<PageId, Page>,
    raw: &[(PageId, PageId)],
) -> Result<BTreeMap<PageId, PageId>, StoreError> {
    let mut direct = BTreeMap::new();
    for &(src, dst) in raw {
        for id in [src, dst] {
            if !pages.contains_key(&id) {
                return Err(StoreError::UnknownPage {
                    context: "redirect".into(),
                    id,
                });
            }
        }
        if pages[&src].kind != PageKind::Redirect {
            return Err(StoreError::Invalid(format!(
                "redirect source {src} is not a redirect page"
            )));
        }
        if let Some(prev) = direct.insert(src, dst) {
            if prev != dst {
                return Err(StoreError::Invalid(format!(
                    "redirect page {src} has two targets ({prev} and {dst})"
                )));
            }
        }
    }

    let mut resolved = BTreeMap::new();
    for page in pages.values().filter(|p| p.kind == PageKind::Redirect) {
        let mut chain = vec![page.id];
        let mut cur = *direct.get(&page.id).ok_or_else(|| {
            StoreError::Invalid(format!("redirect page {} has no target", page.id))
        })?;
        while pages[&cur].kind == PageKind::Redirect {
            if chain.contains(&cur) || chain.len() >= MAX_REDIRECT_DEPTH {
                chain.push(cur);
                return Err(StoreError::RedirectCycle(chain));
            }
            chain.push(cur);
            cur = direct[&cur];
        }
        resolved.insert(page.id, cur);
    }
    Ok(resolved)
}

/// Reads the tab-separated corpus files.
///
/// * pages: `id<TAB>kind<TAB>title`, kind one of `A`, `C`, `R`
/// * catlinks: `child_id<TAB>parent_category_id`
/// * pagelinks: `src_id<TAB>dst_id`
/// * redirects: `src_id<TAB>dst_id`
///
/// Blank lines and lines starting with `#` are skipped in every file.
pub fn load_knowledge_base(
    pages_path: &Path,
    catlinks_path: &Path,
    pagelinks_path: &Path,
    redirects_path: Option<&Path>,
) -> Result<KnowledgeBase, StoreError> {
    let mut pages = Vec::new();
    let mut seen = HashSet::new();
    for_each_row(pages_path, 3, |line, cols| {
        let id = parse_id(cols[0]).map_err(|m| (line, m))?;
        let kind = PageKind::from_code(cols[1])
            .ok_or_else(|| (line, format!("unknown page kind {:?}", cols[1])))?;
        if !seen.insert(id) {
            return Err((line, format!("duplicate page id {id}")));
        }
        pages.push(Page::new(id, kind, cols[2]));
        Ok(())
    })?;

    let read_pairs = |path: &Path| {
        let mut out = Vec::new();
        for_each_row(path, 2, |line, cols| {
            let a = parse_id(cols[0]).map_err(|m| (line, m))?;
            let b = parse_id(cols[1]).map_err(|m| (line, m))?;
            for id in [a, b] {
                if !seen.contains(&id) {
                    return Err((line, format!("unknown page id {id}")));
                }
            }
            out.push((PageId(a), PageId(b)));
            Ok(())
        })?;
        Ok::<_, StoreError>(out)
    };
    let cat_edges = read_pairs(catlinks_path)?;
    let link_edges = read_pairs(pagelinks_path)?;
    let redirects = match redirects_path {
        Some(p) => read_pairs(p)?,
        None => Vec::new(),
    };

    let kb = KnowledgeBase::from_parts(pages, redirects, cat_edges, link_edges)?;
    log::info!("loaded {}", kb.stats());
    Ok(kb)
}

/// Save followed by load.
pub fn snapshot_roundtrip(kb: &KnowledgeBase, path: &Path) -> Result<KnowledgeBase, StoreError> {
    kb.save_snapshot(path)?;
    KnowledgeBase::load_snapshot(path)
}

fn parse_id(s: &str) -> Result<u32, String> {
    match s.trim().parse::<u32>() {
        Ok(0) => Err("page id must be positive".into()),
        Ok(id) => Ok(id),
        Err(_) => Err(format!("invalid page id {s:?}")),
    }
}

pub(crate) fn for_each_row(
    path: &Path,
    columns: usize,
    mut f: impl FnMut(usize, &[&str]) -> Result<(), (usize, String)>,
) -> Result<(), StoreError> {
    let io_err = |source| StoreError::Io {
        path: path.to_path_buf(),
        source,
    };
    let reader = BufReader::new(File::open(path).map_err(io_err)?);
    for (i, line) in reader.lines().enumerate() {
        let line_no = i + 1;
        let line = line.map_err(|source| match source.kind() {
            io::ErrorKind::InvalidData => StoreError::Parse {
                path: path.to_path_buf(),
                line: line_no,
                message: "invalid UTF-8".into(),
            },
            _ => io_err(source),
        })?;
        let line = line.strip_suffix('\r').unwrap_or(&line);
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let cols: Vec<&str> = line.split('\t').collect();
        let fail = |line: usize, message: String| StoreError::Parse {
            path: path.to_path_buf(),
            line,
            message,
        };
        if cols.len() != columns {
            return Err(fail(
                line_no,
                format!("expected {columns} columns, found {}", cols.len()),
            ));
        }
        f(line_no, &cols).map_err(|(l, m)| fail(l, m))?;
    }
    Ok(())
}
