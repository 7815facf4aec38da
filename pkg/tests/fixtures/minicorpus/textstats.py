"""Small text statistics used in reports."""


def word_count(text: str) -> int:
    words = text.split()
    total: int = len(words)
    return total


def mean_length(text: str) -> float:
    words = text.split()
    if not words:
        return 0.0
    lengths = [len(word) for word in words]
    average: float = sum(lengths) / len(lengths)
    return average


def is_shouting(message: str) -> bool:
    trimmed = message.strip()
    loud: bool = trimmed.isupper()
    return loud


def normalize(label: str, upper: bool) -> str:
    stripped = label.strip()
    folded = stripped.upper() if upper else stripped.lower()
    cleaned: str = folded
    return cleaned


def log_line(line: str) -> None:
    print(line)
    return None


MAX_WORDS: int = 4000

GREETING: str = "hello"

RATIO_DEFAULT: float = 0.5
