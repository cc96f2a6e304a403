use std::collections::HashSet;
use std::path::Path;

use crate::expr::Expr;
use crate::model::{
    Assumption, ContextFactor, Decl, DiagnosticRule, Goal, GoalType, GqmPlan, Ident, InterpretationModel, MGoal,
    MetricDecl, MetricKind, Model, Question, Relation, RelationKind, RelationRef, RelationTarget, Strategy,
};
use crate::span::SourceSpan;
use crate::syntax::lexer::{is_fatal, lex, Tok, Token};
use crate::syntax::{is_reserved, ParseError};

pub(crate) type PResult<T> = Result<T, ParseError>;

/// Token cursor shared by the model and expression grammars. Unrecoverable
/// errors travel through `PResult`; recoverable ones accumulate in `errors`.
pub(crate) struct Parser {
    tokens: Vec<Token>,
    pos: usize,
    pub(crate) errors: Vec<ParseError>,
}

impl Parser {
    pub(crate) fn new(text: &str, file: &str) -> Result<Parser, Vec<ParseError>> {
        let (tokens, errors) = lex(text, file);
        if is_fatal(&errors) {
            return Err(errors);
        }
        Ok(Parser { tokens, pos: 0, errors })
    }

    pub(crate) fn peek(&self) -> &Tok {
        &self.tokens[self.pos].tok
    }

    pub(crate) fn span(&self) -> &SourceSpan {
        &self.tokens[self.pos].span
    }

    /// Span of the most recently consumed token.
    pub(crate) fn prev_span(&self) -> &SourceSpan {
        &self.tokens[self.pos.saturating_sub(1)].span
    }

    pub(crate) fn bump(&mut self) -> Token {
        let tok = self.tokens[self.pos].clone();
        if self.pos + 1 < self.tokens.len() {
            self.pos += 1;
        }
        tok
    }

    pub(crate) fn at_keyword(&self, word: &str) -> bool {
        matches!(self.peek(), Tok::Ident(w) if w == word)
    }

    pub(crate) fn at_eof(&self) -> bool {
        *self.peek() == Tok::Eof
    }

    pub(crate) fn unexpected(&self, expected: impl Into<String>) -> ParseError {
        ParseError::new(self.span().clone(), expected, self.peek().to_string())
    }

    pub(crate) fn expect(&mut self, tok: Tok) -> PResult<Token> {
        if *self.peek() == tok {
            Ok(self.bump())
        } else {
            Err(self.unexpected(format!("`{}`", tok.symbol())))
        }
    }

    pub(crate) fn expect_keyword(&mut self, word: &str) -> PResult<Token> {
        if self.at_keyword(word) {
            Ok(self.bump())
        } else {
            Err(self.unexpected(format!("`{word}`")))
        }
    }

    /// Any identifier-shaped token, reserved or not.
    pub(crate) fn word(&mut self, expected: &str) -> PResult<(String, SourceSpan)> {
        match self.peek().clone() {
            Tok::Ident(w) => {
                let span = self.bump().span;
                Ok((w, span))
            }
            _ => Err(self.unexpected(expected)),
        }
    }

    /// An identifier introducing a new element.
    fn decl_ident(&mut self) -> PResult<Ident> {
        let (name, span) = self.word("identifier")?;
        if is_reserved(&name) {
            self.errors.push(ParseError::new(
                span.clone(),
                "identifier",
                format!("reserved word `{name}`"),
            ));
        }
        Ok(Ident::with_span(name, span))
    }

    /// An identifier referring to an element declared elsewhere.
    fn ref_ident(&mut self) -> PResult<Ident> {
        let (name, span) = self.word("identifier")?;
        Ok(Ident::with_span(name, span))
    }

    fn string(&mut self) -> PResult<String> {
        match self.peek().clone() {
            Tok::Str(s) => {
                self.bump();
                Ok(s)
            }
            _ => Err(self.unexpected("string")),
        }
    }

    pub(crate) fn unsigned(&mut self, expected: &str) -> PResult<(u32, SourceSpan)> {
        match self.peek().clone() {
            Tok::Number(n) if !n.contains('.') => {
                let span = self.bump().span;
                match n.parse::<u32>() {
                    Ok(v) => Ok((v, span)),
                    Err(_) => {
                        self.errors
                            .push(ParseError::new(span.clone(), expected, format!("out-of-range `{n}`")));
                        Ok((0, span))
                    }
                }
            }
            _ => Err(self.unexpected(expected)),
        }
    }

    /// `[ item, item, ... ]`, trailing comma allowed.
    fn list<T>(&mut self, mut item: impl FnMut(&mut Self) -> PResult<T>) -> PResult<Vec<T>> {
        self.expect(Tok::LBracket)?;
        let mut items = Vec::new();
        loop {
            if *self.peek() == Tok::RBracket {
                self.bump();
                return Ok(items);
            }
            items.push(item(self)?);
            match self.peek() {
                Tok::Comma => {
                    self.bump();
                }
                Tok::RBracket => {}
                _ => return Err(self.unexpected("`,` or `]`")),
            }
        }
    }

    fn note_duplicate(&mut self, seen: &mut HashSet<String>, field: &str, span: &SourceSpan) {
        if !seen.insert(field.to_string()) {
            self.errors.push(ParseError::new(
                span.clone(),
                format!("`{field}` at most once"),
                format!("repeated `{field}`"),
            ));
        }
    }

    fn model(&mut self, name: String) -> PResult<Model> {
        let mut model = Model::new(name);
        while !self.at_eof() {
            let decl = self.decl()?;
            model.decls.push(decl);
        }
        Ok(model)
    }

    fn decl(&mut self) -> PResult<Decl> {
        const EXPECTED: &str = "a declaration (goal, strategy, context, assumption, metric, gqm, relation)";
        let keyword = match self.peek() {
            Tok::Ident(w) => w.clone(),
            _ => return Err(self.unexpected(EXPECTED)),
        };
        let start = self.span().clone();
        let decl = match keyword.as_str() {
            "goal" => Decl::Goal(self.goal()?),
            "strategy" => Decl::Strategy(self.strategy()?),
            "context" => {
                self.bump();
                let id = self.decl_ident()?;
                let statement = self.string()?;
                Decl::Context(ContextFactor {
                    id,
                    statement,
                    span: SourceSpan::default(),
                })
            }
            "assumption" => {
                self.bump();
                let id = self.decl_ident()?;
                let statement = self.string()?;
                Decl::Assumption(Assumption {
                    id,
                    statement,
                    span: SourceSpan::default(),
                })
            }
            "metric" => Decl::Metric(self.metric_decl()?),
            "gqm" => Decl::Plan(self.plan()?),
            "relation" => Decl::Relation(self.relation()?),
            _ => return Err(self.unexpected(EXPECTED)),
        };
        let span = start.to(self.prev_span());
        Ok(with_span(decl, span))
    }

    fn goal(&mut self) -> PResult<Goal> {
        self.expect_keyword("goal")?;
        let id = self.decl_ident()?;
        let mut goal = Goal::new(String::new());
        goal.id = id;
        self.expect(Tok::LBrace)?;
        let mut seen = HashSet::new();
        loop {
            let field = match self.peek() {
                Tok::RBrace => {
                    self.bump();
                    return Ok(goal);
                }
                Tok::Ident(w) => w.clone(),
                _ => return Err(self.unexpected("`}` or a goal field")),
            };
            let field_span = self.span().clone();
            match field.as_str() {
                "level" => {
                    self.bump();
                    let (level, span) = self.unsigned("positive level")?;
                    if level == 0 {
                        self.errors.push(ParseError::new(span, "positive level", "`0`"));
                    }
                    goal.level = Some(level);
                }
                "type" => {
                    self.bump();
                    let (word, span) = self.word("goal type")?;
                    match GoalType::from_keyword(&word) {
                        Some(t) => goal.goal_type = Some(t),
                        None => self.errors.push(ParseError::new(
                            span,
                            "goal type (growth, success, maintenance, specific_focus)",
                            format!("`{word}`"),
                        )),
                    }
                }
                "activity" | "focus" | "object" | "magnitude" | "timeframe" | "scope" => {
                    self.bump();
                    let value = self.string()?;
                    let slot = match field.as_str() {
                        "activity" => &mut goal.activity,
                        "focus" => &mut goal.focus,
                        "object" => &mut goal.object,
                        "magnitude" => &mut goal.magnitude,
                        "timeframe" => &mut goal.timeframe,
                        _ => &mut goal.scope,
                    };
                    *slot = value;
                }
                "constraints" => {
                    self.bump();
                    goal.constraints = self.list(Self::string)?;
                }
                "relations" => {
                    self.bump();
                    goal.relations = self.list(Self::relation_ref)?;
                }
                "derived_from" => {
                    self.bump();
                    goal.derived_from = Some(self.ref_ident()?);
                }
                "context" => {
                    self.bump();
                    goal.context_refs = self.list(Self::ref_ident)?;
                }
                "assumptions" => {
                    self.bump();
                    goal.assumption_refs = self.list(Self::ref_ident)?;
                }
                _ => return Err(self.unexpected("`}` or a goal field")),
            }
            self.note_duplicate(&mut seen, &field, &field_span);
        }
    }

    fn relation_kind(&mut self) -> PResult<RelationKind> {
        let (word, _) = self.word("`complementary` or `competing`")?;
        RelationKind::from_keyword(&word).ok_or_else(|| {
            ParseError::new(
                self.prev_span().clone(),
                "`complementary` or `competing`",
                format!("`{word}`"),
            )
        })
    }

    fn relation_target(&mut self) -> PResult<RelationTarget> {
        match self.peek() {
            Tok::Str(_) => Ok(RelationTarget::Label(self.string()?)),
            Tok::Ident(_) => Ok(RelationTarget::Goal(self.ref_ident()?)),
            _ => Err(self.unexpected("goal identifier or string")),
        }
    }

    fn relation_ref(&mut self) -> PResult<RelationRef> {
        if let Tok::Str(_) = self.peek() {
            return Ok(RelationRef::Note(self.string()?));
        }
        let kind = self.relation_kind()?;
        let to = self.relation_target()?;
        Ok(RelationRef::Typed { kind, to })
    }

    fn relation(&mut self) -> PResult<Relation> {
        self.expect_keyword("relation")?;
        let from = self.ref_ident()?;
        let kind = self.relation_kind()?;
        let to = self.relation_target()?;
        Ok(Relation {
            kind,
            from,
            to,
            span: SourceSpan::default(),
        })
    }

    fn strategy(&mut self) -> PResult<Strategy> {
        self.expect_keyword("strategy")?;
        let id = self.decl_ident()?;
        self.expect_keyword("for")?;
        let parent_goal = self.ref_ident()?;
        let mut strategy = Strategy {
            id,
            parent_goal,
            decision: String::new(),
            activities: Vec::new(),
            context_refs: Vec::new(),
            assumption_refs: Vec::new(),
            span: SourceSpan::default(),
        };
        self.expect(Tok::LBrace)?;
        let mut seen = HashSet::new();
        loop {
            let field = match self.peek() {
                Tok::RBrace => {
                    self.bump();
                    return Ok(strategy);
                }
                Tok::Ident(w) => w.clone(),
                _ => return Err(self.unexpected("`}` or a strategy field")),
            };
            let field_span = self.span().clone();
            match field.as_str() {
                "decision" => {
                    self.bump();
                    strategy.decision = self.string()?;
                }
                "activities" => {
                    self.bump();
                    strategy.activities = self.list(Self::string)?;
                }
                "context" => {
                    self.bump();
                    strategy.context_refs = self.list(Self::ref_ident)?;
                }
                "assumptions" => {
                    self.bump();
                    strategy.assumption_refs = self.list(Self::ref_ident)?;
                }
                _ => return Err(self.unexpected("`}` or a strategy field")),
            }
            self.note_duplicate(&mut seen, &field, &field_span);
        }
    }

    fn metric_decl(&mut self) -> PResult<MetricDecl> {
        self.expect_keyword("metric")?;
        let id = self.decl_ident()?;
        self.expect(Tok::Colon)?;
        let (kind, _) = self.word("`number` or `boolean`")?;
        let value_kind = match kind.as_str() {
            "number" => MetricKind::Number,
            "boolean" => MetricKind::Boolean,
            other => {
                return Err(ParseError::new(
                    self.prev_span().clone(),
                    "`number` or `boolean`",
                    format!("`{other}`"),
                ))
            }
        };
        let mut metric = MetricDecl {
            id,
            value_kind,
            unit: None,
            period_label: None,
            span: SourceSpan::default(),
        };
        let mut seen = HashSet::new();
        // `unit` and `period` are only meaningful right after the kind, so a
        // following declaration keyword ends the metric.
        while self.at_keyword("unit") || self.at_keyword("period") {
            let field_span = self.span().clone();
            let (field, _) = self.word("`unit` or `period`")?;
            let value = self.string()?;
            if field == "unit" {
                metric.unit = Some(value);
            } else {
                metric.period_label = Some(value);
            }
            self.note_duplicate(&mut seen, &field, &field_span);
        }
        Ok(metric)
    }

    fn plan(&mut self) -> PResult<GqmPlan> {
        let start = self.expect_keyword("gqm")?.span;
        self.expect_keyword("for")?;
        let goal_ref = self.ref_ident()?;
        let strategy_ref = if self.at_keyword("via") {
            self.bump();
            Some(self.ref_ident()?)
        } else {
            None
        };
        self.expect(Tok::LBrace)?;
        let mut mgoal = None;
        let mut questions = Vec::new();
        let mut metric_refs = Vec::new();
        let mut interpretation = None;
        loop {
            let item = match self.peek() {
                Tok::RBrace => break,
                Tok::Ident(w) => w.clone(),
                _ => return Err(self.unexpected("`}`, `mgoal`, `question`, `metric` or `interpretation`")),
            };
            let item_span = self.span().clone();
            match item.as_str() {
                "mgoal" => {
                    self.bump();
                    let parsed = self.mgoal()?;
                    if mgoal.replace(parsed).is_some() {
                        self.errors
                            .push(ParseError::new(item_span, "`mgoal` at most once", "repeated `mgoal`"));
                    }
                }
                "question" => {
                    self.bump();
                    let id = self.decl_ident()?;
                    let text = self.string()?;
                    questions.push(Question { id, text });
                }
                "metric" => {
                    self.bump();
                    metric_refs.push(self.ref_ident()?);
                }
                "interpretation" => {
                    self.bump();
                    let parsed = self.interpretation()?;
                    if interpretation.replace(parsed).is_some() {
                        self.errors.push(ParseError::new(
                            item_span,
                            "`interpretation` at most once",
                            "repeated `interpretation`",
                        ));
                    }
                }
                _ => return Err(self.unexpected("`}`, `mgoal`, `question`, `metric` or `interpretation`")),
            }
        }
        let close = self.bump().span;
        let interpretation = interpretation.unwrap_or_else(|| {
            self.errors
                .push(ParseError::new(close, "`interpretation` block", "`}`"));
            InterpretationModel {
                satisfied_when: Expr::boolean(true),
                diagnostics: Vec::new(),
            }
        });
        Ok(GqmPlan {
            goal_ref,
            strategy_ref,
            mgoal: mgoal.unwrap_or_default(),
            questions,
            metric_refs,
            interpretation,
            span: start,
        })
    }

    fn mgoal(&mut self) -> PResult<MGoal> {
        self.expect(Tok::LBrace)?;
        let mut mgoal = MGoal::default();
        let mut seen = HashSet::new();
        loop {
            let field = match self.peek() {
                Tok::RBrace => {
                    self.bump();
                    return Ok(mgoal);
                }
                Tok::Ident(w) => w.clone(),
                _ => return Err(self.unexpected("`}` or an mgoal field")),
            };
            let field_span = self.span().clone();
            let slot = match field.as_str() {
                "object" => &mut mgoal.object,
                "purpose" => &mut mgoal.purpose,
                "focus" => &mut mgoal.focus,
                "viewpoint" => &mut mgoal.viewpoint,
                "context" => &mut mgoal.context,
                _ => return Err(self.unexpected("`}` or an mgoal field")),
            };
            self.bump();
            *slot = self.string()?;
            self.note_duplicate(&mut seen, &field, &field_span);
        }
    }

    fn interpretation(&mut self) -> PResult<InterpretationModel> {
        self.expect(Tok::LBrace)?;
        self.expect_keyword("satisfied")?;
        self.expect_keyword("when")?;
        let satisfied_when = self.expr()?;
        let mut diagnostics = Vec::new();
        while self.at_keyword("diagnostic") {
            let start = self.bump().span;
            let message = self.string()?;
            self.expect_keyword("when")?;
            let condition = self.expr()?;
            let span = start.to(&condition.span);
            diagnostics.push(DiagnosticRule {
                message,
                condition,
                span,
            });
        }
        if *self.peek() != Tok::RBrace {
            return Err(self.unexpected("`diagnostic` or `}`"));
        }
        self.bump();
        Ok(InterpretationModel {
            satisfied_when,
            diagnostics,
        })
    }
}

fn with_span(decl: Decl, span: SourceSpan) -> Decl {
    match decl {
        Decl::Goal(d) => Decl::Goal(Goal { span, ..d }),
        Decl::Strategy(d) => Decl::Strategy(Strategy { span, ..d }),
        Decl::Context(d) => Decl::Context(ContextFactor { span, ..d }),
        Decl::Assumption(d) => Decl::Assumption(Assumption { span, ..d }),
        Decl::Metric(d) => Decl::Metric(MetricDecl { span, ..d }),
        Decl::Plan(d) => Decl::Plan(GqmPlan { span, ..d }),
        Decl::Relation(d) => Decl::Relation(Relation { span, ..d }),
    }
}

/// Parses `.gqms` text. The model is named after the file stem of `file_name`.
///
/// Any error, recoverable or not, means no model: the caller gets every error
/// collected up to the point parsing stopped.
pub fn parse_model(text: &str, file_name: &str) -> Result<Model, Vec<ParseError>> {
    let name = Path::new(file_name)
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    let mut parser = Parser::new(text, file_name)?;
    match parser.model(name) {
        Ok(model) if parser.errors.is_empty() => Ok(model),
        Ok(_) => Err(parser.errors),
        Err(fatal) => {
            let mut errors = parser.errors;
            errors.push(fatal);
            Err(errors)
        }
    }
}
