import pytest

from corpusmix import registrable_domain


@pytest.mark.parametrize(
    "url,expected",
    [
        ("https://www.example.com/page?q=1", "example.com"),
        ("http://blog.shop.example.co.uk/post", "example.co.uk"),
        ("https://example.com.au", "example.com.au"),
        ("example.org/path", "example.org"),
        ("sub.deep.example.io", "example.io"),
        ("HTTPS://UPPER.EXAMPLE.COM", "example.com"),
        ("http://example.com:8080/x", "example.com"),
        ("host.example.ne.jp", "example.ne.jp"),
    ],
)
def test_registrable_domain(url, expected):
    assert registrable_domain(url) == expected


@pytest.mark.parametrize(
    "url",
    ["", "   ", "localhost", "http://127.0.0.1/x", "co.uk", "%%%", "http://"],
)
def test_unparseable_or_unregistrable(url):
    assert registrable_domain(url) is None
