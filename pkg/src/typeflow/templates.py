"""All prompt wording lives here: sentence templates, op phrases, regexes.

Keeping every template in one module means the conformance tests can be
exhaustive and wording changes touch exactly one file.  The nine step
templates: six dependency descriptions for locals/returns (one per edge
kind), the usage and naming pair for arguments, and the conclusion.
"""

from __future__ import annotations

# -- dependency description templates (locals / returns / globals) ----------

OP_TO_SYMBOL = "The {selector} {name} is assigned from {op}."
SYMBOL_TO_SYMBOL = "The {selector} {name} is assigned from variable {source}."
TYPE_TO_SYMBOL = "The {selector} {name} is assigned from {type}."
OP_TO_OP = "The {role} of {op} is {source_op}."
SYMBOL_TO_OP = "The {role} of {op} is variable {source}."
TYPE_TO_OP = "The {role} of {op} is {type}."

# -- dependency description templates (arguments) ----------------------------

ARG_USAGE = "The argument {name} is used in {usages}."
ARG_NAMING = (
    "Based on the naming convention, it is reasonable to assume that "
    "the type of the argument {name} is `{type}`."
)

# -- conclusion ---------------------------------------------------------------

CONCLUSION = "Therefore, the type of the {selector} {name} is `{type}`."

#: target-kind selector used in sentences and questions
SELECTOR_VARIABLE = "variable"
SELECTOR_RETURN = "return value of"
SELECTOR_ARGUMENT = "argument"

# -- input prompt wording -----------------------------------------------------

PREAMBLE = (
    "Infer the type of the requested Python variable from the given code. "
    "Explain the reasoning steps and give the final type in backquotes."
)
CODE_HEADER = "Code:"
QUESTION = (
    "What is the type of the {selector} {name}? "
    "Provide your reasoning steps and conclude with the type in backquotes."
)
#: question selector differs from the sentence one ("return value f")
QUESTION_SELECTORS = {
    "variable": "variable",
    "return value of": "return value",
    "argument": "argument",
}

# -- phrase table -------------------------------------------------------------

_BINOP_SYMBOLS = {
    "add": "+", "sub": "-", "mult": "*", "div": "/", "floordiv": "//",
    "mod": "%", "pow": "**", "bitand": "&", "bitor": "|", "bitxor": "^",
    "lshift": "<<", "rshift": ">>", "matmult": "@",
}
_UNARY_SYMBOLS = {"usub": "-", "uadd": "+", "invert": "~"}
_COMPREHENSION_PHRASES = {
    "list": "a list comprehension",
    "set": "a set comprehension",
    "dict": "a dict comprehension",
    "generator": "a generator expression",
}

_FIXED_PHRASES = {
    "assignment": "an assignment operation",
    "comparison": "a comparison operation",
    "subscript_read": "a subscript read",
    "subscript_write": "a subscript write",
    "List_Read": "a list",
    "Tuple_Read": "a tuple",
    "Set_Read": "a set",
    "Dict_Read": "a dict",
    "cond_expr": "a conditional expression",
    "return": "a return operation",
    "boolop_and": "an and operation",
    "boolop_or": "an or operation",
    "unaryop_not": "a not operation",
}


def op_phrase(op_kind: str, detail: str = "") -> str:
    """Human phrase for an operation node; total over the op vocabulary.

    Calls render their callee name verbatim ("open"); operators fold the
    word "operation" into the phrase ("a + operation"); literal reads name
    the container ("a dict").
    """
    if op_kind == "call":
        return detail if detail else "a call"
    if op_kind == "attribute":
        return f"a .{detail} attribute access" if detail else "an attribute access"
    if op_kind == "comprehension":
        return _COMPREHENSION_PHRASES.get(detail, "a comprehension")
    if op_kind in _FIXED_PHRASES:
        return _FIXED_PHRASES[op_kind]
    if op_kind.startswith("binop_"):
        return f"a {_BINOP_SYMBOLS[op_kind[6:]]} operation"
    if op_kind.startswith("aug_"):
        return f"a {_BINOP_SYMBOLS[op_kind[4:]]}= operation"
    if op_kind.startswith("unaryop_"):
        return f"a unary {_UNARY_SYMBOLS[op_kind[8:]]} operation"
    raise KeyError(f"no phrase for op kind {op_kind!r}")


# -- conformance regexes ------------------------------------------------------

#: literal type names a TypeLit node can carry (constants and f-strings)
_TYPELIT_NAMES = r"(?:int|float|complex|str|bytes|bool|None|\.\.\.)"
_ROLE = r"(?:operand|target|key|value)"
_SEL = r"(?:variable|return value of)"

#: the nine step/conclusion patterns; mutually exclusive by construction so a
#: rendered sentence matches exactly one of them
TEMPLATE_PATTERNS: dict[str, str] = {
    "op_to_symbol": (
        rf"^\d+\. The {_SEL} \S+ is assigned from "
        rf"(?!variable )(?!{_TYPELIT_NAMES}\.$).+\.$"
    ),
    "symbol_to_symbol": rf"^\d+\. The {_SEL} \S+ is assigned from variable \S+\.$",
    "type_to_symbol": rf"^\d+\. The {_SEL} \S+ is assigned from {_TYPELIT_NAMES}\.$",
    "op_to_op": (
        rf"^\d+\. The {_ROLE} of .+ is (?!variable )(?!{_TYPELIT_NAMES}\.$).+\.$"
    ),
    "symbol_to_op": rf"^\d+\. The {_ROLE} of .+ is variable \S+\.$",
    "type_to_op": rf"^\d+\. The {_ROLE} of .+ is {_TYPELIT_NAMES}\.$",
    "arg_usage": r"^\d+\. The argument \S+ is used in .+\.$",
    "arg_naming": (
        r"^\d+\. Based on the naming convention, it is reasonable to assume "
        r"that the type of the argument \S+ is `.+`\.$"
    ),
    "conclusion": (
        r"^Therefore, the type of the (?:variable|return value of|argument) "
        r"\S+ is `.+`\.$"
    ),
}
