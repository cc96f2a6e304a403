use crate::expr::{BinaryOp, Expr, ExprKind, Func, GoalStatus, MetricRef, UnaryOp};
use crate::span::SourceSpan;
use crate::syntax::lexer::Tok;
use crate::syntax::parser::{PResult, Parser};
use crate::syntax::{is_reserved, ParseError};

fn spanned(kind: ExprKind, span: SourceSpan) -> Expr {
    Expr { kind, span }
}

fn comparison_op(tok: &Tok) -> Option<BinaryOp> {
    Some(match tok {
        Tok::Lt => BinaryOp::Lt,
        Tok::Le => BinaryOp::Le,
        Tok::Gt => BinaryOp::Gt,
        Tok::Ge => BinaryOp::Ge,
        Tok::Eq => BinaryOp::Eq,
        Tok::Ne => BinaryOp::Ne,
        _ => return None,
    })
}

impl Parser {
    pub(crate) fn expr(&mut self) -> PResult<Expr> {
        self.or_expr()
    }

    fn keyword_chain(&mut self, word: &str, op: BinaryOp, operand: fn(&mut Self) -> PResult<Expr>) -> PResult<Expr> {
        let mut lhs = operand(self)?;
        while self.at_keyword(word) {
            self.bump();
            let rhs = operand(self)?;
            let span = lhs.span.to(&rhs.span);
            lhs = spanned(ExprKind::Binary(op, Box::new(lhs), Box::new(rhs)), span);
        }
        Ok(lhs)
    }

    fn or_expr(&mut self) -> PResult<Expr> {
        self.keyword_chain("or", BinaryOp::Or, Self::and_expr)
    }

    fn and_expr(&mut self) -> PResult<Expr> {
        self.keyword_chain("and", BinaryOp::And, Self::cmp_expr)
    }

    fn cmp_expr(&mut self) -> PResult<Expr> {
        let lhs = self.add_expr()?;
        let Some(op) = comparison_op(self.peek()) else {
            return Ok(lhs);
        };
        self.bump();
        let rhs = self.add_expr()?;
        if comparison_op(self.peek()).is_some() {
            return Err(ParseError::new(
                self.span().clone(),
                "`and`/`or` between comparisons",
                format!("chained comparison {}", self.peek()),
            ));
        }
        let span = lhs.span.to(&rhs.span);
        Ok(spanned(ExprKind::Binary(op, Box::new(lhs), Box::new(rhs)), span))
    }

    fn symbol_chain(&mut self, ops: &[(Tok, BinaryOp)], operand: fn(&mut Self) -> PResult<Expr>) -> PResult<Expr> {
        let mut lhs = operand(self)?;
        while let Some((_, op)) = ops.iter().find(|(t, _)| t == self.peek()) {
            let op = *op;
            self.bump();
            let rhs = operand(self)?;
            let span = lhs.span.to(&rhs.span);
            lhs = spanned(ExprKind::Binary(op, Box::new(lhs), Box::new(rhs)), span);
        }
        Ok(lhs)
    }

    fn add_expr(&mut self) -> PResult<Expr> {
        self.symbol_chain(
            &[(Tok::Plus, BinaryOp::Add), (Tok::Minus, BinaryOp::Sub)],
            Self::mul_expr,
        )
    }

    fn mul_expr(&mut self) -> PResult<Expr> {
        self.symbol_chain(&[(Tok::Star, BinaryOp::Mul), (Tok::Slash, BinaryOp::Div)], Self::unary)
    }

    fn unary(&mut self) -> PResult<Expr> {
        if self.at_keyword("not") {
            let start = self.bump().span;
            let operand = self.unary()?;
            let span = start.to(&operand.span);
            return Ok(spanned(ExprKind::Unary(UnaryOp::Not, Box::new(operand)), span));
        }
        if *self.peek() == Tok::Minus {
            let start = self.bump().span;
            if let Tok::Number(_) = self.peek() {
                let lit = self.number()?;
                let value = match lit.kind {
                    ExprKind::Number(n) => -n,
                    _ => unreachable!(),
                };
                return Ok(spanned(ExprKind::Number(value), start.to(&lit.span)));
            }
            let operand = self.unary()?;
            let span = start.to(&operand.span);
            return Ok(spanned(ExprKind::Unary(UnaryOp::Neg, Box::new(operand)), span));
        }
        self.primary()
    }

    fn number(&mut self) -> PResult<Expr> {
        let Tok::Number(text) = self.peek().clone() else {
            return Err(self.unexpected("number"));
        };
        let span = self.bump().span;
        let value: f64 = text.parse().unwrap_or(f64::INFINITY);
        if !value.is_finite() {
            self.errors
                .push(ParseError::new(span.clone(), "finite number", format!("`{text}`")));
            return Ok(spanned(ExprKind::Number(0.0), span));
        }
        Ok(spanned(ExprKind::Number(value), span))
    }

    fn primary(&mut self) -> PResult<Expr> {
        const EXPECTED: &str = "expression";
        match self.peek().clone() {
            Tok::Number(_) => self.number(),
            Tok::LParen => {
                self.bump();
                let inner = self.expr()?;
                self.expect(Tok::RParen)?;
                Ok(inner)
            }
            Tok::Ident(word) => {
                if let Some(status) = GoalStatus::from_keyword(&word) {
                    let span = self.bump().span;
                    return Ok(spanned(ExprKind::Status(status), span));
                }
                match word.as_str() {
                    "true" | "false" => {
                        let span = self.bump().span;
                        Ok(spanned(ExprKind::Bool(word == "true"), span))
                    }
                    "status" => {
                        let start = self.bump().span;
                        self.expect(Tok::LParen)?;
                        let (goal, _) = self.word("goal identifier")?;
                        let end = self.expect(Tok::RParen)?.span;
                        Ok(spanned(ExprKind::GoalStatus(goal), start.to(&end)))
                    }
                    _ => {
                        if let Some(func) = Func::from_name(&word) {
                            return self.call(func);
                        }
                        if is_reserved(&word) {
                            return Err(self.unexpected(EXPECTED));
                        }
                        self.metric_ref()
                    }
                }
            }
            _ => Err(self.unexpected(EXPECTED)),
        }
    }

    fn call(&mut self, func: Func) -> PResult<Expr> {
        let start = self.bump().span;
        self.expect(Tok::LParen)?;
        let mut args = Vec::with_capacity(func.arity());
        for i in 0..func.arity() {
            if i > 0 {
                self.expect(Tok::Comma)?;
            }
            let arg = if func == Func::PctChange {
                match self.peek() {
                    Tok::Ident(w) if !is_reserved(w) => self.metric_ref()?,
                    _ => return Err(self.unexpected("metric reference")),
                }
            } else {
                self.expr()?
            };
            args.push(arg);
        }
        let end = self.expect(Tok::RParen)?.span;
        Ok(spanned(ExprKind::Call(func, args), start.to(&end)))
    }

    /// `M`, `M[t]` or `M[t-k]`.
    fn metric_ref(&mut self) -> PResult<Expr> {
        let (metric, start) = self.word("metric reference")?;
        let mut lag = 0;
        let mut end = start.clone();
        if *self.peek() == Tok::LBracket {
            self.bump();
            self.expect_keyword("t")?;
            if *self.peek() == Tok::Minus {
                self.bump();
                lag = self.unsigned("non-negative integer lag")?.0;
            }
            end = self.expect(Tok::RBracket)?.span;
        }
        Ok(spanned(ExprKind::Metric(MetricRef { metric, lag }), start.to(&end)))
    }
}

/// Parses a standalone interpretation expression.
pub fn parse_expr(text: &str) -> Result<Expr, ParseError> {
    parse_expr_in(text, "<expr>")
}

/// Like [`parse_expr`], attributing spans to `file`.
pub fn parse_expr_in(text: &str, file: &str) -> Result<Expr, ParseError> {
    let mut parser = Parser::new(text, file).map_err(|mut errors| errors.remove(0))?;
    let expr = parser.expr()?;
    if !parser.at_eof() {
        let err = parser.unexpected("operator or end of expression");
        parser.errors.push(err);
    }
    match parser.errors.into_iter().next() {
        Some(err) => Err(err),
        None => Ok(expr),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str) -> Expr {
        let mut e = parse_expr(text).unwrap_or_else(|err| panic!("{text}: {err}"));
        e.clear_spans();
        e
    }

    #[test]
    fn profit_growth_formula() {
        let expected = Expr::binary(
            BinaryOp::Gt,
            Expr::metric("P", 0),
            Expr::binary(BinaryOp::Mul, Expr::number(1.15), Expr::metric("P", 1)),
        );
        assert_eq!(parse("P[t] > 1.15 * P[t-1]"), expected);
        assert_eq!(parse("P > 1.15*P[t - 1]"), expected);
    }

    #[test]
    fn literals() {
        assert_eq!(parse("true"), Expr::boolean(true));
        assert_eq!(
            parse("not_satisfied"),
            Expr::new(ExprKind::Status(GoalStatus::NotSatisfied))
        );
        assert_eq!(parse("-2.5"), Expr::number(-2.5));
    }

    #[test]
    fn pct_change_comparison() {
        let expected = Expr::binary(
            BinaryOp::Gt,
            Expr::call(Func::PctChange, vec![Expr::metric("new_M_reqs", 0)]),
            Expr::number(0.05),
        );
        assert_eq!(parse("pct_change(new_M_reqs) > 0.05"), expected);
    }

    #[test]
    fn precedence_table() {
        // not > * / > + - > comparisons > and > or
        assert_eq!(parse("a or b and c"), parse("a or (b and c)"));
        assert_eq!(parse("a < b + c * d"), parse("a < (b + (c * d))"));
        assert_eq!(parse("not a and b"), parse("(not a) and b"));
        assert_eq!(parse("a - b - c"), parse("(a - b) - c"));
        assert_eq!(parse("x = 1 or y != 2"), parse("(x = 1) or (y != 2)"));
    }

    #[test]
    fn status_reference() {
        let expected = Expr::binary(
            BinaryOp::Eq,
            Expr::status_of("G2"),
            Expr::new(ExprKind::Status(GoalStatus::Satisfied)),
        );
        assert_eq!(parse("status(G2) = satisfied"), expected);
    }

    #[test]
    fn malformed_inputs_report_span() {
        for bad in [
            "",
            "P[t+1] > 0",
            "1 < 2 < 3",
            "min(a)",
            "pct_change(1)",
            "a >",
            "(a",
            "a b",
            "P[s]",
            "and",
        ] {
            let err = parse_expr(bad).expect_err(bad);
            assert!(err.span.start_line >= 1, "{bad}: {err}");
        }
    }

    #[test]
    fn canonical_text_reparses() {
        for text in [
            "P[t] > 1.15 * P[t-1]",
            "not (a[t] < 1) or defined(b[t-2])",
            "-(3) * -x[t] - -2",
            "min(a[t], max(b[t], 1)) / abs(c[t-1]) >= 0",
            "pct_change(m[t-3]) > 0.05 and status(G) != undetermined",
        ] {
            let e = parse(text);
            assert_eq!(parse(&e.to_string()), e, "{text} -> {e}");
        }
    }
}
