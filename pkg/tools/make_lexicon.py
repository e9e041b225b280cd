"""Regenerate src/cskgkit/data/lemmas.tsv from the word lists below.

Run from the repository root:  python3 tools/make_lexicon.py
"""
from pathlib import Path

# base past participle
IRREGULAR_VERBS = """
arise arose arisen
awake awoke awoken
be was been
bear bore born
beat beat beaten
become became become
begin began begun
bend bent bent
bet bet bet
bid bid bid
bind bound bound
bite bit bitten
bleed bled bled
blow blew blown
break broke broken
breed bred bred
bring brought brought
build built built
burn burnt burnt
burst burst burst
buy bought bought
catch caught caught
choose chose chosen
cling clung clung
come came come
cost cost cost
creep crept crept
cut cut cut
deal dealt dealt
dig dug dug
do did done
draw drew drawn
dream dreamt dreamt
drink drank drunk
drive drove driven
eat ate eaten
fall fell fallen
feed fed fed
feel felt felt
fight fought fought
find found found
flee fled fled
fling flung flung
fly flew flown
forbid forbade forbidden
forget forgot forgotten
forgive forgave forgiven
freeze froze frozen
get got gotten
give gave given
go went gone
grind ground ground
grow grew grown
hang hung hung
have had had
hear heard heard
hide hid hidden
hit hit hit
hold held held
hurt hurt hurt
keep kept kept
kneel knelt knelt
know knew known
lay laid laid
lead led led
lean leant leant
leap leapt leapt
learn learnt learnt
leave left left
lend lent lent
let let let
lie lay lain
light lit lit
lose lost lost
make made made
mean meant meant
meet met met
mistake mistook mistaken
overcome overcame overcome
pay paid paid
prove proved proven
put put put
quit quit quit
read read read
ride rode ridden
ring rang rung
rise rose risen
run ran run
say said said
see saw seen
seek sought sought
sell sold sold
send sent sent
set set set
sew sewed sewn
shake shook shaken
shed shed shed
shine shone shone
shoot shot shot
show showed shown
shrink shrank shrunk
shut shut shut
sing sang sung
sink sank sunk
sit sat sat
sleep slept slept
slide slid slid
smell smelt smelt
speak spoke spoken
speed sped sped
spell spelt spelt
spend spent spent
spill spilt spilt
spin spun spun
spit spat spat
split split split
spread spread spread
spring sprang sprung
stand stood stood
steal stole stolen
stick stuck stuck
sting stung stung
stink stank stunk
strike struck struck
string strung strung
strive strove striven
swear swore sworn
sweep swept swept
swim swam swum
swing swung swung
take took taken
teach taught taught
tear tore torn
tell told told
think thought thought
throw threw thrown
understand understood understood
wake woke woken
wear wore worn
weave wove woven
weep wept wept
win won won
wind wound wound
withdraw withdrew withdrawn
write wrote written
"""

DOUBLING_IRREGULAR = set("""
bet bid begin cut dig forget get hit let put quit run set shut sit spin spit
split swim win
""".split())

# regular verbs; a trailing * doubles the final consonant before -ed/-ing
REGULAR_VERBS = """
accept achieve act add admire admit* adopt advise afford agree allow
announce annoy answer apologize appear apply argue arrange arrive ask attach
attack attend avoid bake balance ban* bathe beg* behave believe belong blame
bless blink boil bore borrow bounce bow box brush bump burp call calm care
carry celebrate change chase chat* cheat check cheer chew chop* clap* clean
clear climb close collect comb complain complete concentrate confess connect
consider contain continue cook copy correct cough count cover crash crawl
create cross cry cure dance dare decide deliver depend describe deserve
destroy develop die disagree disappear discover dislike divide donate doubt
drag* drop* dress drown dry earn educate embarrass employ empty encourage end
enjoy enter entertain escape examine excite excuse exercise exist expect
explain explode express fail fancy fasten fear fetch file fill film fire fit*
fix flash float flood flow fold follow force form fry gather gaze glow glue
grab* grate greet grin* grip* groan guarantee guard guess guide hammer hand
handle happen harm hate heal heat help hop* hope hug* hum* hunt hurry identify
ignore imagine impress improve include increase influence inform inject
injure interest interrupt introduce invent invite itch jog* join joke judge
juggle jump kick kill kiss kneel knit* knock knot* label land last laugh launch
learn lick lift like limp list listen live load lock long look love manage
march mark marry match matter measure melt memorize mend miss mix moan move
mug* multiply murder nail name need nest nod* note notice number obey object
observe obtain offer open order own pack paddle paint park part pass pat*
pause peel perform permit* pick pinch place plan* plant play please plug*
point poke polish possess post pour practice pray prefer* prepare present
preserve press pretend prevent print produce promise protect provide pull
pump punch punish push question queue race rain raise reach realize receive
recognize record reduce refuse regret* reign reject rejoice relax release
rely remain remember remind remove repair repeat replace reply report request
rescue retire return rhyme rinse risk rob* rock roll rot* rub* ruin rule rush
sail satisfy save scare scatter scream screw scribble scrub* seal search
separate serve settle shave shelter shiver shock shop* shout shrug* sigh sign
sin* sip* ski skip* slap* slip* slow smash smile smoke snatch sneeze sniff
snore snow soak solve soothe sound spare spark sparkle spill spoil spot*
spray sprout squash squeak squeal squeeze stain stamp stare start stay steer
step* stir* stitch stop* store strap* strengthen stretch strip* stroke stuff
subtract succeed suck suffer suggest suit supply support suppose surprise
surround suspect suspend switch talk tame tap* taste tease telephone tempt
terrify test thank thaw tick tickle tie time tip* tire touch tour tow trace
trade train transport trap* travel treat tremble trick trip* trot* trouble
trust try tug* tumble turn twist type undress unfasten unite unlock unpack
untidy use vanish visit wail wait walk wander want warm warn wash waste watch
water wave weigh welcome whine whip* whirl whisper whistle wink wipe wish
wobble wonder work worry wrap* wreck wrestle wriggle yawn yell zip* zoom
"""

IRREGULAR_NOUNS = """
man men
woman women
child children
person people
foot feet
tooth teeth
goose geese
mouse mice
knife knives
leaf leaves
life lives
wife wives
wolf wolves
half halves
shelf shelves
loaf loaves
thief thieves
calf calves
ox oxen
fish fish
sheep sheep
deer deer
"""

NOUNS = """
apple bag ball banana bed bike bird boat book bottle box bread breakfast
brush bucket bus cake car cat chair cheese church class coat computer cookie
cup dish dog door dress egg friend game glass gift hat house ingredient
kiss lunch match meal movie party patient pet phone plate present school shoe
store story table toy tree watch window
"""

ADJECTIVES = """
good better best
bad worse worst
big bigger biggest
hot hotter hottest
happy happier happiest
sad sadder saddest
tired
"""


def _third_person(base):
    if base in ("be", "have"):
        return {"be": "is", "have": "has"}[base]
    if base.endswith(("s", "x", "z", "ch", "sh", "o")):
        return base + "es"
    if base.endswith("y") and base[-2:-1] not in "aeiou":
        return base[:-1] + "ies"
    return base + "s"


def _ing(base, double=False):
    if base == "be":
        return "being"
    if double:
        return base + base[-1] + "ing"
    if base.endswith("ie"):
        return base[:-2] + "ying"
    if base.endswith("e") and not base.endswith(("ee", "ye", "oe")):
        return base[:-1] + "ing"
    return base + "ing"


def _ed(base, double=False):
    if double:
        return base + base[-1] + "ed"
    if base.endswith("e"):
        return base + "d"
    if base.endswith("y") and base[-2:-1] not in "aeiou":
        return base[:-1] + "ied"
    return base + "ed"


def _plural(noun):
    if noun.endswith(("s", "x", "z", "ch", "sh")):
        return noun + "es"
    if noun.endswith("y") and noun[-2:-1] not in "aeiou":
        return noun[:-1] + "ies"
    return noun + "s"


def build():
    rows = set()
    for line in IRREGULAR_VERBS.strip().splitlines():
        base, past, part = line.split()
        for form in (past, part, _third_person(base)):
            rows.add((form, "v", base))
        rows.add((_ing(base, base in DOUBLING_IRREGULAR), "v", base))
    for raw in REGULAR_VERBS.split():
        double = raw.endswith("*")
        base = raw.rstrip("*")
        for form in (_ed(base, double), _third_person(base), _ing(base, double)):
            rows.add((form, "v", base))
    for line in IRREGULAR_NOUNS.strip().splitlines():
        sing, plur = line.split()
        rows.add((plur, "n", sing))
    for noun in NOUNS.split():
        rows.add((_plural(noun), "n", noun))
    for line in ADJECTIVES.strip().splitlines():
        base, *forms = line.split()
        for form in forms:
            rows.add((form, "a", base))
    return sorted(r for r in rows if r[0] != r[2])


def main():
    out = Path(__file__).resolve().parent.parent / "src" / "cskgkit" / "data" / "lemmas.tsv"
    rows = build()
    with out.open("w", encoding="utf-8") as fh:
        fh.write("# surface\tpos\tlemma  (generated by tools/make_lexicon.py, version 1)\n")
        for surface, pos, lemma in rows:
            fh.write(f"{surface}\t{pos}\t{lemma}\n")
    print(f"wrote {len(rows)} entries to {out}")


if __name__ == "__main__":
    main()
