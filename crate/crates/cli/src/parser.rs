//! Recursive-descent parser and resolver for the definition language.
//!
//! Grammar sketch:
//!
//! ```text
//! document     := { definition }
//! definition   := graph | partition | presentation | system | map
//! graph        := "graph" name "{" "vertices" ":" [names] ";"
//!                                  "edges" ":" [edges] ";"
//!                                  ["orient" ":" [names] ";"] "}"
//! edge         := "(" name "," [name ","] name "," name ")"
//! partition    := "partition" name "on" name "{" { "block" "{" [refs] "}" ";" } "}"
//! presentation := "presentation" name "{" "graph" name ";" "base" names ";" "}"
//! map          := "map" name ":" name "->" name "{" { ref "->" ref ";" } "}"
//! system       := "system" name "{" ( "builtin" ":" name ";"
//!                                   | { "level" number ":" name ";" }
//!                                     { "bond" number ":" name ";" } ) "}"
//! ref          := ["v:" | "e:"] name
//! ```
//!
//! Definitions must precede their uses. Element references inside
//! partitions and maps may carry an explicit `v:`/`e:` namespace; bare names
//! are looked up in both namespaces and must be unambiguous.

use cofinite::relations::{ElemId, Partition};
use cofinite::topograph::{edge_id, inverse_local, vertex_id, ElemKind, FinGraph, GraphMap};
use cofinite::uniformity::CofinitePresentation;

use crate::diag::Diagnostic;
use crate::document::{Def, Document, SystemDecl};
use crate::lexer::{lex, Token, TokenKind};

pub fn parse(text: &str) -> Result<Document, Vec<Diagnostic>> {
    let tokens = lex(text).map_err(|d| vec![d])?;
    let mut parser = Parser {
        tokens,
        pos: 0,
        doc: Document::default(),
    };
    match parser.document() {
        Ok(()) => Ok(parser.doc),
        Err(d) => Err(vec![d]),
    }
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
    doc: Document,
}

type PResult<T> = Result<T, Diagnostic>;

impl Parser {
    fn peek(&self) -> &Token {
        &self.tokens[self.pos]
    }

    fn advance(&mut self) -> Token {
        let t = self.tokens[self.pos].clone();
        if self.pos + 1 < self.tokens.len() {
            self.pos += 1;
        }
        t
    }

    fn err_here(&self, message: impl Into<String>, expected: Vec<&'static str>) -> Diagnostic {
        let t = self.peek();
        Diagnostic::new(t.line, t.col, message).expecting(expected)
    }

    fn expect_kind(&mut self, kind: TokenKind, what: &'static str) -> PResult<Token> {
        if self.peek().kind == kind {
            Ok(self.advance())
        } else {
            Err(self.err_here(
                format!("found {}", self.peek().kind.describe()),
                vec![what],
            ))
        }
    }

    fn ident(&mut self, what: &'static str) -> PResult<(String, u32, u32)> {
        match &self.peek().kind {
            TokenKind::Ident(_) => {
                let t = self.advance();
                let TokenKind::Ident(s) = t.kind else {
                    unreachable!()
                };
                Ok((s, t.line, t.col))
            }
            other => Err(self.err_here(format!("found {}", other.describe()), vec![what])),
        }
    }

    fn keyword(&mut self, kw: &'static str) -> PResult<()> {
        let (s, line, col) = self.ident(kw)?;
        if s == kw {
            Ok(())
        } else {
            Err(Diagnostic::new(line, col, format!("found `{s}`")).expecting(vec![kw]))
        }
    }

    fn document(&mut self) -> PResult<()> {
        loop {
            match &self.peek().kind {
                TokenKind::Eof => return Ok(()),
                TokenKind::Ident(kw) => match kw.as_str() {
                    "graph" => self.graph_def()?,
                    "partition" => self.partition_def()?,
                    "presentation" => self.presentation_def()?,
                    "map" => self.map_def()?,
                    "system" => self.system_def()?,
                    other => {
                        return Err(self
                            .err_here(
                                format!("unknown definition `{other}`"),
                                vec!["graph", "partition", "presentation", "map", "system"],
                            ));
                    }
                },
                other => {
                    return Err(self.err_here(
                        format!("found {}", other.describe()),
                        vec!["graph", "partition", "presentation", "map", "system"],
                    ));
                }
            }
        }
    }

    fn fresh_name(&mut self, what: &'static str) -> PResult<String> {
        let (name, line, col) = self.ident(what)?;
        if self.doc.defs.contains_key(&name) {
            return Err(Diagnostic::new(
                line,
                col,
                format!("`{name}` is already defined"),
            ));
        }
        Ok(name)
    }

    /// Comma-separated identifiers, possibly empty, ending before `;` / `}`.
    fn name_list(&mut self) -> PResult<Vec<(String, u32, u32)>> {
        let mut out = Vec::new();
        if !matches!(self.peek().kind, TokenKind::Ident(_)) {
            return Ok(out);
        }
        loop {
            out.push(self.ident("identifier")?);
            if self.peek().kind == TokenKind::Comma {
                self.advance();
            } else {
                return Ok(out);
            }
        }
    }

    /// An element reference with an optional `v:` / `e:` namespace prefix.
    fn elem_ref(&mut self) -> PResult<(Option<ElemKind>, String, u32, u32)> {
        let (first, line, col) = self.ident("element")?;
        if self.peek().kind == TokenKind::Colon && (first == "v" || first == "e") {
            self.advance();
            let (name, ..) = self.ident("element name")?;
            let kind = if first == "v" {
                ElemKind::Vertex
            } else {
                ElemKind::Edge
            };
            Ok((Some(kind), name, line, col))
        } else {
            Ok((None, first, line, col))
        }
    }

    fn resolve_elem(
        &self,
        g: &FinGraph,
        kind: Option<ElemKind>,
        name: &str,
        line: u32,
        col: u32,
    ) -> PResult<ElemId> {
        let v = vertex_id(name);
        let e = edge_id(name);
        match kind {
            Some(ElemKind::Vertex) => {
                if g.vertices().contains(&v) {
                    Ok(v)
                } else {
                    Err(Diagnostic::new(line, col, format!("unknown vertex `{name}`")))
                }
            }
            Some(ElemKind::Edge) => {
                if g.edges().contains(&e) {
                    Ok(e)
                } else {
                    Err(Diagnostic::new(line, col, format!("unknown edge `{name}`")))
                }
            }
            None => match (g.vertices().contains(&v), g.edges().contains(&e)) {
                (true, false) => Ok(v),
                (false, true) => Ok(e),
                (true, true) => Err(Diagnostic::new(
                    line,
                    col,
                    format!("`{name}` names both a vertex and an edge; qualify with v: or e:"),
                )),
                (false, false) => {
                    Err(Diagnostic::new(line, col, format!("unknown element `{name}`")))
                }
            },
        }
    }

    fn graph_ref(&mut self) -> PResult<(String, FinGraph)> {
        let (name, line, col) = self.ident("graph name")?;
        match self.doc.graph(&name) {
            Some(g) => Ok((name, g.clone())),
            None => Err(Diagnostic::new(line, col, format!("unknown graph `{name}`"))),
        }
    }

    fn graph_def(&mut self) -> PResult<()> {
        self.keyword("graph")?;
        let name = self.fresh_name("graph name")?;
        let header = (self.peek().line, self.peek().col);
        self.expect_kind(TokenKind::LBrace, "`{`")?;
        self.keyword("vertices")?;
        self.expect_kind(TokenKind::Colon, "`:`")?;
        let vertices = self.name_list()?;
        self.expect_kind(TokenKind::Semi, "`;`")?;
        self.keyword("edges")?;
        self.expect_kind(TokenKind::Colon, "`:`")?;
        let mut edges: Vec<(String, String, String, String, u32, u32)> = Vec::new();
        let mut declared: Vec<String> = Vec::new();
        if self.peek().kind == TokenKind::LParen {
            loop {
                let t = self.expect_kind(TokenKind::LParen, "`(`")?;
                let mut fields = Vec::new();
                loop {
                    fields.push(self.ident("edge tuple field")?.0);
                    if self.peek().kind == TokenKind::Comma {
                        self.advance();
                    } else {
                        break;
                    }
                }
                self.expect_kind(TokenKind::RParen, "`)`")?;
                let (e, inv, s, tg) = match fields.len() {
                    3 => (
                        fields[0].clone(),
                        inverse_local(&fields[0]),
                        fields[1].clone(),
                        fields[2].clone(),
                    ),
                    4 => (
                        fields[0].clone(),
                        fields[1].clone(),
                        fields[2].clone(),
                        fields[3].clone(),
                    ),
                    n => {
                        return Err(Diagnostic::new(
                            t.line,
                            t.col,
                            format!("edge tuple has {n} fields, expected 3 or 4"),
                        ));
                    }
                };
                declared.push(e.clone());
                edges.push((e, inv, s, tg, t.line, t.col));
                if self.peek().kind == TokenKind::Comma {
                    self.advance();
                } else {
                    break;
                }
            }
        }
        self.expect_kind(TokenKind::Semi, "`;`")?;
        let mut orient: Option<Vec<(String, u32, u32)>> = None;
        if matches!(&self.peek().kind, TokenKind::Ident(kw) if kw == "orient") {
            self.advance();
            self.expect_kind(TokenKind::Colon, "`:`")?;
            orient = Some(self.name_list()?);
            self.expect_kind(TokenKind::Semi, "`;`")?;
        }
        self.expect_kind(TokenKind::RBrace, "`}`")?;

        // derive missing inverse tuples
        let mut with_inverses = edges.clone();
        for (e, inv, s, t, line, col) in &edges {
            if !edges.iter().any(|(e2, ..)| e2 == inv) {
                with_inverses.push((inv.clone(), e.clone(), t.clone(), s.clone(), *line, *col));
            }
        }
        let vert_names: Vec<&str> = vertices.iter().map(|(v, ..)| v.as_str()).collect();
        let tuples: Vec<(&str, &str, &str, &str)> = with_inverses
            .iter()
            .map(|(e, i, s, t, ..)| (e.as_str(), i.as_str(), s.as_str(), t.as_str()))
            .collect();
        let orient_names: Option<Vec<&str>> = orient
            .as_ref()
            .map(|names| names.iter().map(|(n, ..)| n.as_str()).collect());
        let graph = FinGraph::new(&vert_names, &tuples, orient_names.as_deref()).map_err(|e| {
            Diagnostic::new(header.0, header.1, format!("invalid graph `{name}`: {e}"))
        })?;
        let _ = declared;
        self.doc.defs.insert(name, Def::Graph(graph));
        Ok(())
    }

    fn partition_def(&mut self) -> PResult<()> {
        self.keyword("partition")?;
        let name = self.fresh_name("partition name")?;
        self.keyword("on")?;
        let (gname, graph) = self.graph_ref()?;
        let header = (self.peek().line, self.peek().col);
        self.expect_kind(TokenKind::LBrace, "`{`")?;
        let mut blocks: Vec<Vec<ElemId>> = Vec::new();
        let mut seen: Vec<ElemId> = Vec::new();
        while matches!(&self.peek().kind, TokenKind::Ident(kw) if kw == "block") {
            self.advance();
            self.expect_kind(TokenKind::LBrace, "`{`")?;
            let mut block = Vec::new();
            while matches!(self.peek().kind, TokenKind::Ident(_)) {
                let (kind, ename, line, col) = self.elem_ref()?;
                let id = self.resolve_elem(&graph, kind, &ename, line, col)?;
                if seen.contains(&id) {
                    return Err(Diagnostic::new(
                        line,
                        col,
                        format!("`{ename}` appears in two blocks"),
                    ));
                }
                seen.push(id.clone());
                block.push(id);
                if self.peek().kind == TokenKind::Comma {
                    self.advance();
                } else {
                    break;
                }
            }
            self.expect_kind(TokenKind::RBrace, "`}`")?;
            self.expect_kind(TokenKind::Semi, "`;`")?;
            if !block.is_empty() {
                blocks.push(block);
            }
        }
        self.expect_kind(TokenKind::RBrace, "`}`")?;
        for id in graph.combined().iter() {
            if !seen.contains(id) {
                return Err(Diagnostic::new(
                    header.0,
                    header.1,
                    format!("partition `{name}` does not cover `{id}`"),
                ));
            }
        }
        let partition = Partition::from_blocks(graph.combined(), blocks).map_err(|e| {
            Diagnostic::new(header.0, header.1, format!("invalid partition `{name}`: {e}"))
        })?;
        self.doc.defs.insert(
            name,
            Def::Partition {
                graph: gname,
                partition,
            },
        );
        Ok(())
    }

    fn presentation_def(&mut self) -> PResult<()> {
        self.keyword("presentation")?;
        let name = self.fresh_name("presentation name")?;
        let header = (self.peek().line, self.peek().col);
        self.expect_kind(TokenKind::LBrace, "`{`")?;
        self.keyword("graph")?;
        let (gname, graph) = self.graph_ref()?;
        self.expect_kind(TokenKind::Semi, "`;`")?;
        self.keyword("base")?;
        let refs = self.name_list()?;
        self.expect_kind(TokenKind::Semi, "`;`")?;
        self.expect_kind(TokenKind::RBrace, "`}`")?;
        let mut members = Vec::new();
        let mut base_refs = Vec::new();
        for (pname, line, col) in &refs {
            match self.doc.partition(pname) {
                Some((pg, partition)) if pg == gname => {
                    members.push(partition.clone());
                    base_refs.push(pname.clone());
                }
                Some((pg, _)) => {
                    return Err(Diagnostic::new(
                        *line,
                        *col,
                        format!("partition `{pname}` lives on `{pg}`, not `{gname}`"),
                    ));
                }
                None => {
                    return Err(Diagnostic::new(
                        *line,
                        *col,
                        format!("unknown partition `{pname}`"),
                    ));
                }
            }
        }
        base_refs.sort();
        base_refs.dedup();
        let presentation = CofinitePresentation::new(&graph, members).map_err(|e| {
            Diagnostic::new(
                header.0,
                header.1,
                format!("invalid presentation `{name}`: {e}"),
            )
        })?;
        self.doc.defs.insert(
            name,
            Def::Presentation {
                graph: gname,
                base_refs,
                presentation,
            },
        );
        Ok(())
    }

    fn map_def(&mut self) -> PResult<()> {
        self.keyword("map")?;
        let name = self.fresh_name("map name")?;
        self.expect_kind(TokenKind::Colon, "`:`")?;
        let (fname, from) = self.graph_ref()?;
        self.expect_kind(TokenKind::Arrow, "`->`")?;
        let (tname, to) = self.graph_ref()?;
        let header = (self.peek().line, self.peek().col);
        self.expect_kind(TokenKind::LBrace, "`{`")?;
        let mut ventries: Vec<(ElemId, ElemId)> = Vec::new();
        let mut eentries: Vec<(ElemId, ElemId)> = Vec::new();
        while matches!(self.peek().kind, TokenKind::Ident(_)) {
            let (skind, sname, sline, scol) = self.elem_ref()?;
            let src = self.resolve_elem(&from, skind, &sname, sline, scol)?;
            self.expect_kind(TokenKind::Arrow, "`->`")?;
            let (tkind, tn, tline, tcol) = self.elem_ref()?;
            let src_is_vertex = from.vertices().contains(&src);
            let expect_kind = if src_is_vertex {
                ElemKind::Vertex
            } else {
                ElemKind::Edge
            };
            if let Some(k) = tkind {
                if k != expect_kind {
                    return Err(Diagnostic::new(
                        tline,
                        tcol,
                        format!("`{sname}` and `{tn}` are not the same kind"),
                    ));
                }
            }
            let dst = self.resolve_elem(&to, Some(expect_kind), &tn, tline, tcol)?;
            self.expect_kind(TokenKind::Semi, "`;`")?;
            if src_is_vertex {
                ventries.push((src, dst));
            } else {
                eentries.push((src, dst));
            }
        }
        self.expect_kind(TokenKind::RBrace, "`}`")?;
        // complete edge entries equivariantly where the inverse is missing
        let mut completed = eentries.clone();
        for (src, dst) in &eentries {
            let src_inv = from.inv_of(src).expect("edge of source graph").clone();
            if !eentries.iter().any(|(s, _)| s == &src_inv) {
                let dst_inv = to.inv_of(dst).expect("edge of target graph").clone();
                completed.push((src_inv, dst_inv));
            }
        }
        let map = GraphMap::new(from, to, ventries, completed).map_err(|e| {
            Diagnostic::new(header.0, header.1, format!("invalid map `{name}`: {e}"))
        })?;
        self.doc.defs.insert(
            name,
            Def::Map {
                from: fname,
                to: tname,
                map,
            },
        );
        Ok(())
    }

    fn number(&mut self, what: &'static str) -> PResult<(u32, u32, u32)> {
        let (s, line, col) = self.ident(what)?;
        match s.parse::<u32>() {
            Ok(n) => Ok((n, line, col)),
            Err(_) => Err(Diagnostic::new(line, col, format!("`{s}` is not a number"))
                .expecting(vec![what])),
        }
    }

    fn system_def(&mut self) -> PResult<()> {
        self.keyword("system")?;
        let name = self.fresh_name("system name")?;
        let header = (self.peek().line, self.peek().col);
        self.expect_kind(TokenKind::LBrace, "`{`")?;
        let decl = if matches!(&self.peek().kind, TokenKind::Ident(kw) if kw == "builtin") {
            self.advance();
            self.expect_kind(TokenKind::Colon, "`:`")?;
            let (builtin, line, col) = self.ident("builtin name")?;
            if cofinite::presented::builtin_system(&builtin).is_none() {
                return Err(Diagnostic::new(
                    line,
                    col,
                    format!("unknown builtin `{builtin}`"),
                ));
            }
            self.expect_kind(TokenKind::Semi, "`;`")?;
            SystemDecl::Builtin(builtin)
        } else {
            let mut levels: Vec<(u32, String)> = Vec::new();
            while matches!(&self.peek().kind, TokenKind::Ident(kw) if kw == "level") {
                self.advance();
                let (n, line, col) = self.number("level index")?;
                self.expect_kind(TokenKind::Colon, "`:`")?;
                let (gname, _) = self.graph_ref()?;
                self.expect_kind(TokenKind::Semi, "`;`")?;
                if n as usize != levels.len() {
                    return Err(Diagnostic::new(
                        line,
                        col,
                        format!("level {n} out of order, expected {}", levels.len()),
                    ));
                }
                levels.push((n, gname));
            }
            let mut bonds: Vec<(u32, String)> = Vec::new();
            while matches!(&self.peek().kind, TokenKind::Ident(kw) if kw == "bond") {
                self.advance();
                let (n, line, col) = self.number("bond index")?;
                self.expect_kind(TokenKind::Colon, "`:`")?;
                let (mname, mline, mcol) = self.ident("map name")?;
                self.expect_kind(TokenKind::Semi, "`;`")?;
                if n as usize != bonds.len() {
                    return Err(Diagnostic::new(
                        line,
                        col,
                        format!("bond {n} out of order, expected {}", bonds.len()),
                    ));
                }
                let map = match self.doc.map(&mname) {
                    Some(m) => m,
                    None => {
                        return Err(Diagnostic::new(
                            mline,
                            mcol,
                            format!("unknown map `{mname}`"),
                        ));
                    }
                };
                let upper = self
                    .doc
                    .graph(&levels.get(n as usize + 1).map(|(_, g)| g.clone()).unwrap_or_default())
                    .cloned();
                let lower = self
                    .doc
                    .graph(&levels.get(n as usize).map(|(_, g)| g.clone()).unwrap_or_default())
                    .cloned();
                match (upper, lower) {
                    (Some(u), Some(l)) if map.source() == &u && map.target() == &l => {}
                    _ => {
                        return Err(Diagnostic::new(
                            mline,
                            mcol,
                            format!(
                                "bond {n} must map level {} onto level {n}",
                                n + 1
                            ),
                        ));
                    }
                }
                bonds.push((n, mname));
            }
            if levels.is_empty() {
                return Err(Diagnostic::new(
                    header.0,
                    header.1,
                    format!("system `{name}` declares no levels"),
                ));
            }
            if bonds.len() + 1 != levels.len() {
                return Err(Diagnostic::new(
                    header.0,
                    header.1,
                    format!(
                        "system `{name}` has {} levels but {} bonds",
                        levels.len(),
                        bonds.len()
                    ),
                ));
            }
            SystemDecl::Explicit {
                levels: levels.into_iter().map(|(_, g)| g).collect(),
                bonds: bonds.into_iter().map(|(_, m)| m).collect(),
            }
        };
        self.expect_kind(TokenKind::RBrace, "`}`")?;
        self.doc.defs.insert(name, Def::System(decl));
        Ok(())
    }
}
