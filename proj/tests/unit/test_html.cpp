#include <catch2/catch_amalgamated.hpp>

#include "tourmon/html.hpp"

using namespace tourmon;
using namespace tourmon::html;

static const char* kPage = R"(<!doctype html>
<html>
<head><meta name="listing-id" content="X-1"><title>T &amp; Co</title></head>
<body>
  <div class="page main">
    <h1 class="hotel-name"> Riad   &Eacute;toile </h1>
    <div id="prices">
      <div class="price" data-currency="MAD">1&nbsp;406,50</div>
      <div class="price old" data-currency="MAD">1 600,00</div>
    </div>
    <ul>
      <li class="theme-staff">9,1</li>
      <li class="theme-wifi">8,0</li>
    </ul>
    <section id="reviews">
      <div class="review"><span class="rid">r1</span><p class="rtext">bien &eacute;t&eacute;</p></div>
      <div class="review"><span class="rid">r2</span><p class="rtext">super</p></div>
    </section>
    <img src="x.png"><br>
    <p>tail</p>
  </div>
</body>
</html>)";

TEST_CASE("entity decoding") {
  CHECK(decode_entities("a &amp; b") == "a & b");
  CHECK(decode_entities("&eacute;t&eacute;") == "été");
  CHECK(decode_entities("1&nbsp;406") == "1\xc2\xa0"
                                         "406");
  CHECK(decode_entities("&#233;") == "é");
  CHECK(decode_entities("&#x20AC;") == "€");
  CHECK(decode_entities("&unknown;") == "&unknown;");  // left intact
}

TEST_CASE("parser builds a tree that survives tag soup") {
  auto doc = Document::parse("<div><p>one<p>two</div><span>z</span>");
  auto ps = query_all(doc, parse_selector("p"), doc.root());
  REQUIRE(ps.size() == 2);
  CHECK(doc.inner_text(ps[0]) == "one");
  CHECK(doc.inner_text(ps[1]) == "two");
}

TEST_CASE("void tags do not capture following content") {
  auto doc = Document::parse(kPage);
  auto tail = query_first(doc, parse_selector("div.page p"), doc.root());
  // the <img> and <br> must not swallow the trailing <p>
  REQUIRE(tail.has_value());
}

TEST_CASE("inner_text concatenates descendants and decodes entities") {
  auto doc = Document::parse(kPage);
  auto h1 = query_first(doc, parse_selector("h1.hotel-name"), doc.root());
  REQUIRE(h1.has_value());
  // raw inner text keeps source whitespace; trimming is a post step
  CHECK(doc.inner_text(*h1).find("Riad") != std::string::npos);
  CHECK(doc.inner_text(*h1).find("Étoile") != std::string::npos);
}

TEST_CASE("selector grammar pieces") {
  auto sel = parse_selector("div#prices > div.price[data-currency=MAD]::attr(data-currency)");
  CHECK(sel.parts.size() == 2);
  CHECK(sel.parts[1].child_of_previous);
  REQUIRE(sel.extract_attr.has_value());
  CHECK(*sel.extract_attr == "data-currency");
  CHECK(sel.source ==
        "div#prices > div.price[data-currency=MAD]::attr(data-currency)");
  CHECK_THROWS_AS(parse_selector(""), ConfigError);
  CHECK_THROWS_AS(parse_selector("div[unclosed"), ConfigError);
  CHECK_THROWS_AS(parse_selector("p::attr(x"), ConfigError);
}

TEST_CASE("query matches id, class, attribute and combinators") {
  auto doc = Document::parse(kPage);

  auto prices = query_all(doc, parse_selector(".price"), doc.root());
  CHECK(prices.size() == 2);

  // multi-class element: both classes must be present
  auto old_price = query_all(doc, parse_selector("div.price.old"), doc.root());
  REQUIRE(old_price.size() == 1);
  CHECK(doc.inner_text(old_price[0]).find("600") != std::string::npos);

  auto by_attr =
      query_all(doc, parse_selector("[data-currency=\"MAD\"]"), doc.root());
  CHECK(by_attr.size() == 2);

  auto meta = query_first(
      doc, parse_selector("meta[name=listing-id]::attr(content)"), doc.root());
  REQUIRE(meta.has_value());
  CHECK(doc.node(*meta).attr("content").value() == "X-1");

  // child combinator: only direct children count
  CHECK(query_all(doc, parse_selector("#prices > .price"), doc.root()).size() ==
        2);
  CHECK(query_all(doc, parse_selector("body > .price"), doc.root()).empty());
  // descendant combinator crosses levels
  CHECK(query_all(doc, parse_selector("body .price"), doc.root()).size() == 2);
}

TEST_CASE("query is scoped strictly under the scope node") {
  auto doc = Document::parse(kPage);
  auto reviews = query_all(doc, parse_selector("div.review"), doc.root());
  REQUIRE(reviews.size() == 2);
  auto rid0 = query_first(doc, parse_selector(".rid"), reviews[0]);
  auto rid1 = query_first(doc, parse_selector(".rid"), reviews[1]);
  REQUIRE(rid0.has_value());
  REQUIRE(rid1.has_value());
  CHECK(doc.inner_text(*rid0) == "r1");
  CHECK(doc.inner_text(*rid1) == "r2");
  // scope node itself is not a candidate
  auto self = query_all(doc, parse_selector("div.review"), reviews[0]);
  CHECK(self.empty());
}

TEST_CASE("document order of matches") {
  auto doc = Document::parse(kPage);
  auto themes = query_all(doc, parse_selector("ul li"), doc.root());
  REQUIRE(themes.size() == 2);
  CHECK(doc.inner_text(themes[0]) == "9,1");
  CHECK(doc.inner_text(themes[1]) == "8,0");
}

TEST_CASE("attribute presence-only condition") {
  auto doc = Document::parse("<a href=\"#\">x</a><a>y</a>");
  auto with_href = query_all(doc, parse_selector("a[href]"), doc.root());
  REQUIRE(with_href.size() == 1);
  CHECK(doc.inner_text(with_href[0]) == "x");
}

TEST_CASE("comments and scripts are skipped") {
  auto doc = Document::parse(
      "<div><!-- <p>ghost</p> --><script>var x = '<p>no</p>';</script>"
      "<p>real</p></div>");
  auto ps = query_all(doc, parse_selector("p"), doc.root());
  REQUIRE(ps.size() == 1);
  CHECK(doc.inner_text(ps[0]) == "real");
}
