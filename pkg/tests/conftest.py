import pathlib

import pytest

FIXTURES = pathlib.Path(__file__).parent / "fixtures"


@pytest.fixture(scope="session")
def fixtures_dir() -> pathlib.Path:
    return FIXTURES


@pytest.fixture(scope="session")
def dev20_text() -> str:
    return (FIXTURES / "dev20.m2").read_text(encoding="utf-8")


@pytest.fixture(scope="session")
def dev20_corpus(dev20_text):
    from geceval.corpus import parse_m2

    return parse_m2(dev20_text)


@pytest.fixture(scope="session")
def table2_rates() -> dict:
    """tag -> (gpt4o, llama) correction-rate pairs from the published table."""
    rates = {}
    lines = (FIXTURES / "table2_rates.tsv").read_text().splitlines()
    for line in lines[1:]:
        tag, gpt, llama = line.split("\t")
        rates[tag] = (float(gpt), float(llama))
    return rates
