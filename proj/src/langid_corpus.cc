// Training text for the bundled language profiles.

#include "filter_audit/langid.h"

namespace filter_audit {
namespace {

constexpr std::string_view kEnglish = R"(
The city council met on Tuesday evening to discuss the new budget for the coming year.
Many residents were worried about the rising cost of housing and the lack of public transport.
After a long debate, the members agreed to increase funding for schools and to build more
affordable homes near the river. The mayor said that the decision was not easy, but that it
would help families who have struggled for a long time. Some people thought the plan was too
expensive, while others believed it did not go far enough. In the afternoon, a group of
students visited the old library, which has been closed since the flood last winter. They
hope that the building will open again before the summer, because it is one of the few places
where young people can study in peace. The weather was cold and wet, and most of the shops
on the main street were already closed when the meeting finished. Her brother works at the
hospital and his wife teaches history at the university. They usually walk their dog in the
park every morning before breakfast, and on weekends they like to cook with friends. What
would you do if you had more free time? I think that reading a good book is always a pleasant
way to spend an evening. The company announced that its profits had fallen by ten percent,
which surprised many analysts who had expected strong growth. Through the window we could see
the children playing with a ball while their parents were talking about the weather and the
news. This is the story of a small town that changed its future by working together.
)";

constexpr std::string_view kGerman = R"(
Der Stadtrat hat am Dienstagabend über den neuen Haushalt für das kommende Jahr beraten.
Viele Bürger machen sich Sorgen über die steigenden Mieten und den schlechten öffentlichen
Nahverkehr. Nach einer langen Diskussion haben die Mitglieder beschlossen, mehr Geld für
Schulen auszugeben und günstige Wohnungen in der Nähe des Flusses zu bauen. Der Bürgermeister
sagte, dass die Entscheidung nicht leicht gewesen sei, aber dass sie den Familien helfen werde.
Einige Leute fanden den Plan zu teuer, während andere meinten, er gehe nicht weit genug. Am
Nachmittag besuchte eine Gruppe von Studenten die alte Bibliothek, die seit dem Hochwasser im
letzten Winter geschlossen ist. Sie hoffen, dass das Gebäude vor dem Sommer wieder öffnet, weil
es einer der wenigen Orte ist, an denen junge Menschen in Ruhe lernen können. Das Wetter war
kalt und nass, und die meisten Geschäfte in der Hauptstraße waren schon geschlossen. Ihr Bruder
arbeitet im Krankenhaus und seine Frau unterrichtet Geschichte an der Universität. Sie gehen
jeden Morgen vor dem Frühstück mit dem Hund im Park spazieren, und am Wochenende kochen sie gern
mit Freunden. Was würdest du tun, wenn du mehr Zeit hättest? Ich glaube, dass ein gutes Buch
immer eine schöne Art ist, einen Abend zu verbringen. Das Unternehmen teilte mit, dass der
Gewinn um zehn Prozent gesunken sei, was viele Experten überrascht hat. Durch das Fenster sahen
wir die Kinder, die mit einem Ball spielten, während ihre Eltern sich über das Wetter und die
Nachrichten unterhielten. Dies ist die Geschichte einer kleinen Stadt, die gemeinsam ihre
Zukunft verändert hat.
)";

constexpr std::string_view kFrench = R"(
Le conseil municipal s'est réuni mardi soir pour discuter du nouveau budget de l'année prochaine.
Beaucoup d'habitants sont inquiets de la hausse des loyers et du manque de transports en commun.
Après un long débat, les membres ont décidé d'augmenter le financement des écoles et de construire
des logements abordables près de la rivière. Le maire a dit que la décision n'était pas facile,
mais qu'elle aiderait les familles qui ont des difficultés depuis longtemps. Certaines personnes
pensaient que le projet était trop cher, tandis que d'autres estimaient qu'il n'allait pas assez
loin. L'après-midi, un groupe d'étudiants a visité la vieille bibliothèque, qui est fermée depuis
l'inondation de l'hiver dernier. Ils espèrent que le bâtiment ouvrira de nouveau avant l'été,
parce que c'est l'un des rares endroits où les jeunes peuvent étudier dans le calme. Il faisait
froid et humide, et la plupart des magasins de la rue principale étaient déjà fermés. Son frère
travaille à l'hôpital et sa femme enseigne l'histoire à l'université. Ils promènent leur chien
dans le parc chaque matin avant le petit déjeuner, et le week-end ils aiment cuisiner avec des
amis. Que ferais-tu si tu avais plus de temps libre? Je pense que lire un bon livre est toujours
une façon agréable de passer la soirée. L'entreprise a annoncé que ses bénéfices avaient baissé
de dix pour cent, ce qui a surpris de nombreux analystes. Par la fenêtre, nous voyions les enfants
jouer avec un ballon pendant que leurs parents parlaient du temps et des nouvelles. C'est
l'histoire d'une petite ville qui a changé son avenir en travaillant ensemble.
)";

constexpr std::string_view kSpanish = R"(
El ayuntamiento se reunió el martes por la noche para hablar del nuevo presupuesto del año que
viene. Muchos vecinos están preocupados por el aumento del precio de la vivienda y la falta de
transporte público. Después de un largo debate, los miembros acordaron aumentar la financiación
de las escuelas y construir viviendas asequibles cerca del río. El alcalde dijo que la decisión
no fue fácil, pero que ayudaría a las familias que llevan mucho tiempo con dificultades. Algunas
personas pensaban que el plan era demasiado caro, mientras que otras creían que no iba lo
bastante lejos. Por la tarde, un grupo de estudiantes visitó la antigua biblioteca, que está
cerrada desde la inundación del invierno pasado. Esperan que el edificio vuelva a abrir antes
del verano, porque es uno de los pocos lugares donde los jóvenes pueden estudiar con
tranquilidad. Hacía frío y llovía, y la mayoría de las tiendas de la calle principal ya estaban
cerradas. Su hermano trabaja en el hospital y su mujer enseña historia en la universidad. Pasean
al perro por el parque todas las mañanas antes del desayuno, y los fines de semana les gusta
cocinar con sus amigos. ¿Qué harías si tuvieras más tiempo libre? Creo que leer un buen libro es
siempre una manera agradable de pasar la tarde. La empresa anunció que sus beneficios habían
bajado un diez por ciento, lo que sorprendió a muchos analistas. Por la ventana veíamos a los
niños jugando con una pelota mientras sus padres hablaban del tiempo y de las noticias. Esta es
la historia de un pequeño pueblo que cambió su futuro trabajando juntos.
)";

constexpr std::string_view kItalian = R"(
Il consiglio comunale si è riunito martedì sera per discutere il nuovo bilancio per il prossimo
anno. Molti cittadini sono preoccupati per l'aumento degli affitti e per la mancanza di trasporti
pubblici. Dopo un lungo dibattito, i membri hanno deciso di aumentare i fondi per le scuole e di
costruire case a prezzi accessibili vicino al fiume. Il sindaco ha detto che la decisione non è
stata facile, ma che aiuterà le famiglie che da molto tempo sono in difficoltà. Alcune persone
pensavano che il progetto fosse troppo costoso, mentre altre credevano che non andasse abbastanza
lontano. Nel pomeriggio, un gruppo di studenti ha visitato la vecchia biblioteca, che è chiusa
dall'alluvione dello scorso inverno. Sperano che l'edificio riapra prima dell'estate, perché è
uno dei pochi luoghi dove i giovani possono studiare in pace. Faceva freddo e pioveva, e la
maggior parte dei negozi della via principale era già chiusa. Suo fratello lavora all'ospedale e
sua moglie insegna storia all'università. Ogni mattina portano il cane al parco prima della
colazione, e nei fine settimana amano cucinare con gli amici. Che cosa faresti se avessi più tempo
libero? Penso che leggere un buon libro sia sempre un modo piacevole di passare la serata.
L'azienda ha annunciato che i suoi profitti sono diminuiti del dieci per cento, cosa che ha
sorpreso molti analisti. Dalla finestra vedevamo i bambini giocare con una palla mentre i loro
genitori parlavano del tempo e delle notizie. Questa è la storia di una piccola città che ha
cambiato il suo futuro lavorando insieme.
)";

constexpr std::string_view kDutch = R"(
De gemeenteraad kwam dinsdagavond bijeen om de nieuwe begroting voor het komende jaar te
bespreken. Veel inwoners maken zich zorgen over de stijgende huurprijzen en het gebrek aan
openbaar vervoer. Na een lang debat besloten de leden meer geld uit te geven aan scholen en
betaalbare woningen te bouwen in de buurt van de rivier. De burgemeester zei dat het besluit niet
makkelijk was, maar dat het de gezinnen zou helpen die het al lange tijd moeilijk hebben.
Sommige mensen vonden het plan te duur, terwijl anderen vonden dat het niet ver genoeg ging. In
de middag bezocht een groep studenten de oude bibliotheek, die sinds de overstroming van vorige
winter gesloten is. Zij hopen dat het gebouw voor de zomer weer opengaat, omdat het een van de
weinige plekken is waar jongeren rustig kunnen studeren. Het was koud en nat, en de meeste
winkels in de hoofdstraat waren al dicht. Haar broer werkt in het ziekenhuis en zijn vrouw geeft
geschiedenis aan de universiteit. Ze laten elke ochtend voor het ontbijt de hond uit in het
park, en in het weekend koken ze graag met vrienden. Wat zou jij doen als je meer vrije tijd had?
Ik denk dat het lezen van een goed boek altijd een prettige manier is om een avond door te
brengen. Het bedrijf maakte bekend dat de winst met tien procent was gedaald, wat veel analisten
verraste. Door het raam zagen we de kinderen met een bal spelen terwijl hun ouders over het weer
en het nieuws praatten. Dit is het verhaal van een klein dorp dat samen zijn toekomst veranderde.
)";

constexpr std::string_view kPortuguese = R"(
A câmara municipal reuniu-se na terça-feira à noite para discutir o novo orçamento para o próximo
ano. Muitos moradores estão preocupados com o aumento das rendas e com a falta de transportes
públicos. Depois de um longo debate, os membros decidiram aumentar o financiamento das escolas e
construir habitações a preços acessíveis perto do rio. O presidente da câmara disse que a decisão
não foi fácil, mas que ajudaria as famílias que há muito tempo passam por dificuldades. Algumas
pessoas achavam que o plano era demasiado caro, enquanto outras pensavam que não ia
suficientemente longe. À tarde, um grupo de estudantes visitou a antiga biblioteca, que está
fechada desde a inundação do inverno passado. Eles esperam que o edifício volte a abrir antes do
verão, porque é um dos poucos lugares onde os jovens podem estudar com tranquilidade. Estava frio
e chovia, e a maioria das lojas da rua principal já estava fechada. O irmão dela trabalha no
hospital e a mulher dele ensina história na universidade. Todas as manhãs passeiam o cão no
parque antes do pequeno-almoço, e aos fins de semana gostam de cozinhar com os amigos. O que
farias se tivesses mais tempo livre? Acho que ler um bom livro é sempre uma maneira agradável de
passar a noite. A empresa anunciou que os seus lucros tinham descido dez por cento, o que
surpreendeu muitos analistas. Pela janela víamos as crianças a brincar com uma bola enquanto os
pais falavam do tempo e das notícias. Esta é a história de uma pequena cidade que mudou o seu
futuro trabalhando em conjunto.
)";

}  // namespace

const std::map<std::string, std::string_view>& BundledLanguageText() {
  static const std::map<std::string, std::string_view> kText = {
      {"de", kGerman},  {"en", kEnglish}, {"es", kSpanish}, {"fr", kFrench},
      {"it", kItalian}, {"nl", kDutch},   {"pt", kPortuguese},
  };
  return kText;
}

}  // namespace filter_audit
