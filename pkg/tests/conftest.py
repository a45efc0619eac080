import hypothesis.strategies as st
from hypothesis import settings

from corpusmix import Document

settings.register_profile("suite", deadline=None, max_examples=100)
settings.load_profile("suite")

_KNOWN_KEYS = {
    "id", "source", "text", "url", "domain", "token_count", "quality_score", "language",
}

json_scalars = st.one_of(
    st.none(),
    st.booleans(),
    st.integers(min_value=-(10**9), max_value=10**9),
    st.text(max_size=20),
)


@st.composite
def documents(draw) -> Document:
    text = draw(st.text(max_size=120))
    if text:
        token_count = draw(st.one_of(st.none(), st.integers(min_value=0, max_value=100_000)))
    else:
        token_count = draw(st.sampled_from([None, 0]))
    quality_score = draw(
        st.one_of(st.none(), st.floats(min_value=0.0, max_value=5.0, allow_nan=False))
    )
    extra = draw(
        st.dictionaries(
            st.text(min_size=1, max_size=10).filter(lambda k: k not in _KNOWN_KEYS),
            json_scalars,
            max_size=3,
        )
    )
    return Document(
        id=draw(st.text(min_size=1, max_size=16)),
        source=draw(st.sampled_from(["web", "code", "math", "misc"])),
        text=text,
        url=draw(st.one_of(st.none(), st.text(max_size=30))),
        domain=draw(st.one_of(st.none(), st.text(max_size=20))),
        token_count=token_count,
        quality_score=quality_score,
        language=draw(st.one_of(st.none(), st.sampled_from(["en", "fr", "java", "python"]))),
        extra=extra,
    )


@st.composite
def document_lists(draw, max_size=12) -> list[Document]:
    docs = draw(st.lists(documents(), max_size=max_size))
    # corpus invariant: unique ids
    seen = set()
    unique = []
    for i, doc in enumerate(docs):
        if doc.id in seen:
            continue
        seen.add(doc.id)
        unique.append(doc)
    return unique
